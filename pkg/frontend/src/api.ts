/**
 * Typed client for the stratos service. Pure request construction: the same
 * state always produces the same request, so a recorded session replays
 * identically.
 */

import type {
  ConcentrationResponse,
  ProductivityResponse,
  SimulateResponse,
  StratifyConfigDoc,
  StratifyResponse,
  UploadResponse,
} from './types.js';

export interface RequestSpec {
  method: 'GET' | 'POST';
  path: string;
  body?: string;
  contentType?: string;
}

export function uploadRequest(csv: string): RequestSpec {
  return { method: 'POST', path: '/v1/portfolios', body: csv, contentType: 'text/csv' };
}

export function stratifyRequest(portfolioId: string, config: StratifyConfigDoc): RequestSpec {
  return {
    method: 'POST',
    path: `/v1/portfolios/${portfolioId}/stratify`,
    body: JSON.stringify(config),
    contentType: 'application/json',
  };
}

export function simulateRequest(
  portfolioId: string,
  candidates: number[],
  t_b: number,
  t_c: number,
  baseline: number,
): RequestSpec {
  return {
    method: 'POST',
    path: `/v1/portfolios/${portfolioId}/simulate`,
    body: JSON.stringify({ candidates, t_b, t_c, baseline_t_a: baseline }),
    contentType: 'application/json',
  };
}

export function concentrationRequest(portfolioId: string, dims: string[]): RequestSpec {
  const query = dims.length ? `?dims=${encodeURIComponent(dims.join(','))}` : '';
  return { method: 'GET', path: `/v1/portfolios/${portfolioId}/hhi${query}` };
}

export function productivityRequest(portfolioId: string, j: number, J: number): RequestSpec {
  return { method: 'GET', path: `/v1/portfolios/${portfolioId}/productivity?j=${j}&J=${J}` };
}

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    public baseUrl: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async send<T>(spec: RequestSpec): Promise<T> {
    const init: RequestInit = { method: spec.method };
    if (spec.body !== undefined) {
      init.body = spec.body;
      init.headers = { 'Content-Type': spec.contentType ?? 'application/json' };
    }
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl.replace(/\/$/, '') + spec.path, init);
    } catch (err) {
      throw new ServiceError(0, `service unreachable: ${String(err)}`);
    }
    const text = await response.text();
    if (!response.ok) {
      let detail = text;
      try {
        detail = (JSON.parse(text) as { detail?: string }).detail ?? text;
      } catch {
        /* plain-text error body */
      }
      throw new ServiceError(response.status, detail);
    }
    return JSON.parse(text) as T;
  }

  upload(csv: string): Promise<UploadResponse> {
    return this.send(uploadRequest(csv));
  }

  stratify(portfolioId: string, config: StratifyConfigDoc): Promise<StratifyResponse> {
    return this.send(stratifyRequest(portfolioId, config));
  }

  simulate(
    portfolioId: string,
    candidates: number[],
    t_b: number,
    t_c: number,
    baseline: number,
  ): Promise<SimulateResponse> {
    return this.send(simulateRequest(portfolioId, candidates, t_b, t_c, baseline));
  }

  concentration(portfolioId: string, dims: string[]): Promise<ConcentrationResponse> {
    return this.send(concentrationRequest(portfolioId, dims));
  }

  productivity(portfolioId: string, j: number, J: number): Promise<ProductivityResponse> {
    return this.send(productivityRequest(portfolioId, j, J));
  }
}
