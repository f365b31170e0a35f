/**
 * DOM wiring for the calibration dashboard.
 *
 * Views render from `SessionState` snapshots; every displayed number comes
 * from a service response. Threshold drags re-simulate through a trailing
 * debounce (only settled positions hit the service) with latest-wins reply
 * handling.
 */

import { ApiClient, ServiceError } from './api.js';
import { barModels } from './concentration.js';
import { exportConfigJson, withPolicyPass, withPolicyStep } from './config.js';
import {
  DEFAULT_BOX,
  curvePath,
  markerModels,
  thresholdFromDrag,
  xOfRank,
  yOfShare,
} from './pareto.js';
import { debounce, LatestWins } from './scheduler.js';
import { SessionState } from './state.js';
import type { SimulateResponse } from './types.js';

const DEBOUNCE_MS = 250;
const SVG_NS = 'http://www.w3.org/2000/svg';

function el<K extends keyof HTMLElementTagNameMap>(tag: K, cls?: string): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  return node;
}

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function startApp(): void {
  const state = new SessionState();
  const baseInput = byId<HTMLInputElement>('base-url');
  baseInput.value = localStorage.getItem('stratos-base-url') ?? 'http://127.0.0.1:8765';
  let client = new ApiClient(baseInput.value);
  baseInput.addEventListener('change', () => {
    localStorage.setItem('stratos-base-url', baseInput.value);
    client = new ApiClient(baseInput.value);
  });

  const errorBanner = byId<HTMLDivElement>('error-banner');
  const simulateGate = new LatestWins<SimulateResponse>();

  const refreshSimulation = () => {
    const snap = state.current;
    if (!snap.portfolio) return;
    const { t_a, t_b, t_c } = snap.config.thresholds;
    void simulateGate.run(
      () => client.simulate(snap.portfolio!.portfolio_id, [t_a], t_b, t_c, t_a),
      (response) => state.applySimulate(response),
      (err) => state.reportError(describe(err)),
    );
  };
  const debouncedSimulate = debounce(refreshSimulation, DEBOUNCE_MS);

  const refreshAll = async () => {
    const snap = state.current;
    if (!snap.portfolio) return;
    const id = snap.portfolio.portfolio_id;
    try {
      const blend = currentBlend();
      state.applyProductivity(await client.productivity(id, blend.j, blend.J));
      state.applyStratify(await client.stratify(id, snap.config));
      state.applyConcentration(await client.concentration(id, snap.selectedDims));
    } catch (err) {
      state.reportError(describe(err));
    }
    refreshSimulation();
  };

  // ------------------------------------------------------------------ upload
  const fileInput = byId<HTMLInputElement>('portfolio-file');
  fileInput.addEventListener('change', async () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    try {
      const uploaded = await client.upload(await file.text());
      state.setPortfolio(uploaded);
      await refreshAll();
    } catch (err) {
      state.reportError(describe(err));
    }
  });

  // ----------------------------------------------------------------- blend j/J
  const blendJ = byId<HTMLInputElement>('blend-j');
  const blendRevenue = byId<HTMLInputElement>('blend-J');
  const currentBlend = () => ({
    j: Math.max(1, Number.parseInt(blendJ.value || '1', 10)),
    J: Math.max(0, Number.parseFloat(blendRevenue.value || '0')),
  });
  for (const input of [blendJ, blendRevenue]) {
    input.addEventListener('change', () => void refreshAll());
  }

  // ------------------------------------------------------------------ pareto
  const svg = byId<HTMLElement>('pareto-svg') as unknown as SVGSVGElement;
  svg.setAttribute('viewBox', `0 0 ${DEFAULT_BOX.width} ${DEFAULT_BOX.height}`);
  let dragging: 't_a' | 't_b' | 't_c' | null = null;

  svg.addEventListener('pointermove', (event) => {
    if (!dragging) return;
    const rect = svg.getBoundingClientRect();
    const y = ((event.clientY - rect.top) / rect.height) * DEFAULT_BOX.height;
    state.setThreshold(dragging, thresholdFromDrag(y, DEFAULT_BOX));
    debouncedSimulate();
  });
  const stopDrag = () => {
    if (dragging) {
      dragging = null;
      debouncedSimulate();
      void refreshAll();
    }
  };
  svg.addEventListener('pointerup', stopDrag);
  svg.addEventListener('pointerleave', stopDrag);

  function renderPareto(): void {
    const snap = state.current;
    svg.replaceChildren();
    const shares = snap.productivity?.shares ?? [];
    if (shares.length === 0) return;

    const axis = document.createElementNS(SVG_NS, 'path');
    const bottom = yOfShare(0, DEFAULT_BOX);
    axis.setAttribute(
      'd',
      `M${DEFAULT_BOX.padLeft},${DEFAULT_BOX.padTop} L${DEFAULT_BOX.padLeft},${bottom} ` +
        `L${DEFAULT_BOX.width - DEFAULT_BOX.padRight},${bottom}`,
    );
    axis.setAttribute('class', 'axis');
    svg.appendChild(axis);

    const curve = document.createElementNS(SVG_NS, 'path');
    curve.setAttribute('d', curvePath(shares, DEFAULT_BOX));
    curve.setAttribute('class', 'curve');
    svg.appendChild(curve);

    if (snap.stratify) {
      const aCount = snap.stratify.summary.classes['A']?.count ?? 0;
      shares.slice(0, Math.min(shares.length, 400)).forEach((s, i) => {
        const dot = document.createElementNS(SVG_NS, 'circle');
        dot.setAttribute('cx', xOfRank(i + 1, shares.length, DEFAULT_BOX).toFixed(2));
        dot.setAttribute('cy', yOfShare(parseFloat(s), DEFAULT_BOX).toFixed(2));
        dot.setAttribute('r', '2.5');
        dot.setAttribute('class', i < aCount ? 'dot dot-a' : 'dot');
        svg.appendChild(dot);
      });
    }

    for (const marker of markerModels(snap.config.thresholds, DEFAULT_BOX)) {
      const line = document.createElementNS(SVG_NS, 'line');
      line.setAttribute('x1', String(DEFAULT_BOX.padLeft));
      line.setAttribute('x2', String(DEFAULT_BOX.width - DEFAULT_BOX.padRight));
      line.setAttribute('y1', marker.y.toFixed(2));
      line.setAttribute('y2', marker.y.toFixed(2));
      line.setAttribute('class', `marker marker-${marker.name}`);
      line.addEventListener('pointerdown', (event) => {
        event.preventDefault();
        dragging = marker.name;
      });
      svg.appendChild(line);

      const text = document.createElementNS(SVG_NS, 'text');
      text.setAttribute('x', String(DEFAULT_BOX.width - DEFAULT_BOX.padRight - 4));
      text.setAttribute('y', (marker.y - 4).toFixed(2));
      text.setAttribute('class', 'marker-label');
      text.setAttribute('text-anchor', 'end');
      text.textContent = marker.label;
      svg.appendChild(text);
    }
  }

  // ------------------------------------------------------------ impact table
  const impactBody = byId<HTMLTableSectionElement>('impact-body');

  function renderImpact(): void {
    const snap = state.current;
    impactBody.replaceChildren();
    for (const row of snap.simulate?.rows ?? []) {
      const tr = el('tr');
      for (const cell of [
        row.t_a,
        String(row.a_count),
        row.a_revenue_share,
        row.entering.join(' '),
        row.leaving.join(' '),
      ]) {
        const td = el('td');
        td.textContent = cell;
        tr.appendChild(td);
      }
      impactBody.appendChild(tr);
    }
  }

  // ------------------------------------------------------- concentration view
  const dimsInput = byId<HTMLInputElement>('dims-input');
  dimsInput.addEventListener('change', () => {
    state.setSelectedDims(
      dimsInput.value
        .split(',')
        .map((d) => d.trim())
        .filter(Boolean),
    );
    void refreshAll();
  });
  const barsHost = byId<HTMLDivElement>('concentration-bars');

  function renderConcentration(): void {
    const snap = state.current;
    barsHost.replaceChildren();
    if (!snap.concentration) return;
    for (const bar of barModels(snap.concentration)) {
      const rowEl = el('div', 'bar-row');
      const label = el('span', 'bar-label');
      label.textContent = `${bar.label} (n=${bar.n})`;
      const track = el('div', 'bar-track');
      const fill = el('div', 'bar-fill');
      fill.style.width = `${(bar.extent * 100).toFixed(2)}%`;
      const floor = el('div', 'bar-floor');
      floor.style.left = `${(bar.floorExtent * 100).toFixed(2)}%`;
      floor.title = `floor 10^4/n = ${bar.hFloor}`;
      const value = el('span', 'bar-value');
      value.textContent = String(bar.h);
      track.append(fill, floor);
      rowEl.append(label, track, value);
      barsHost.appendChild(rowEl);
    }
    if (snap.concentration.mixed_n) {
      const note = el('div', 'note');
      note.textContent = 'slices differ in item count; indexes are not directly comparable';
      barsHost.appendChild(note);
    }
  }

  // ------------------------------------------------------------ policy editor
  const policyMode = byId<HTMLSelectElement>('policy-mode');
  const policyHMin = byId<HTMLInputElement>('policy-hmin');
  const policyValue = byId<HTMLInputElement>('policy-value');
  const policySteps = byId<HTMLUListElement>('policy-steps');

  const currentPolicy = () => {
    const dim = state.current.selectedDims[0];
    if (!dim) return null;
    const pass = state.current.config.passes.find((p) => p.name === `by-${dim}`);
    return pass?.concentration_policy ?? null;
  };

  const applyPolicy = (policy: ReturnType<typeof currentPolicy>) => {
    const dim = state.current.selectedDims[0];
    if (!dim) {
      state.reportError('choose a dimension before editing the policy');
      return;
    }
    const next = withPolicyPass(state.current.config, dim, policy);
    if (typeof next === 'string') {
      state.reportError(next);
      return;
    }
    const problem = state.setConfig(next);
    if (problem) {
      state.reportError(problem);
      return;
    }
    void refreshAll(); // re-simulate the slices the policy affects
  };

  byId<HTMLButtonElement>('policy-add').addEventListener('click', () => {
    const base = currentPolicy() ?? {
      mode: policyMode.value as 'add' | 'override',
      steps: [],
    };
    const withMode = { ...base, mode: policyMode.value as 'add' | 'override' };
    const edited = withPolicyStep(withMode, {
      h_min: Number.parseFloat(policyHMin.value),
      value: Number.parseFloat(policyValue.value),
    });
    if (typeof edited === 'string') {
      state.reportError(edited);
      return;
    }
    applyPolicy(edited);
  });

  byId<HTMLButtonElement>('policy-clear').addEventListener('click', () => applyPolicy(null));

  function renderPolicy(): void {
    policySteps.replaceChildren();
    const policy = currentPolicy();
    if (!policy) return;
    for (const step of policy.steps) {
      const li = el('li');
      const sign = policy.mode === 'add' ? '+' : '=';
      li.textContent = `index >= ${step.h_min}: t_a ${sign} ${step.value}`;
      const remove = el('button', 'secondary');
      remove.type = 'button';
      remove.textContent = 'remove';
      remove.addEventListener('click', () => {
        const remaining = policy.steps.filter((s) => s.h_min !== step.h_min);
        applyPolicy(remaining.length ? { ...policy, steps: remaining } : null);
      });
      li.appendChild(remove);
      policySteps.appendChild(li);
    }
  }

  // ------------------------------------------------------------------ export
  byId<HTMLButtonElement>('export-config').addEventListener('click', () => {
    const json = exportConfigJson(state.current.config);
    const blob = new Blob([json], { type: 'application/json' });
    const link = el('a');
    link.href = URL.createObjectURL(blob);
    link.download = 'stratify-config.json';
    link.click();
    URL.revokeObjectURL(link.href);
  });

  // ------------------------------------------------------------------ render
  const summaryHost = byId<HTMLDivElement>('portfolio-summary');

  state.subscribe((snap) => {
    errorBanner.hidden = snap.error === null;
    errorBanner.textContent = snap.error
      ? `${snap.error}${snap.stale ? ' (showing stale data)' : ''}`
      : '';
    summaryHost.textContent = snap.portfolio
      ? `portfolio ${snap.portfolio.portfolio_id}: ${snap.portfolio.n} items, ` +
        `total ${snap.portfolio.total_value}` +
        (snap.stratify ? `, A coverage ${snap.stratify.summary.a_coverage}` : '') +
        (snap.productivity ? `, suggested t_a* ${snap.productivity.t_a_star}` : '')
      : 'no portfolio loaded';
    renderPareto();
    renderImpact();
    renderConcentration();
    renderPolicy();
  });
}

function describe(err: unknown): string {
  if (err instanceof ServiceError) {
    return err.status === 0 ? err.message : `service error ${err.status}: ${err.message}`;
  }
  return String(err);
}

if (typeof document !== 'undefined' && document.getElementById('pareto-svg')) {
  startApp();
}
