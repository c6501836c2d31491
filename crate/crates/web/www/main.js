import init, { derivative_curve, compare_fft, solve_soliton } from "./pkg/fraclap_web.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

// Draws each series of `lines` ({label, y, dashed}) against the shared x.
function plot(canvas, legend, x, lines) {
  const dpr = window.devicePixelRatio || 1;
  const w = canvas.clientWidth, h = canvas.clientHeight;
  canvas.width = w * dpr;
  canvas.height = h * dpr;
  const ctx = canvas.getContext("2d");
  ctx.scale(dpr, dpr);
  ctx.clearRect(0, 0, w, h);

  const finite = lines.flatMap((l) => Array.from(l.y).filter(Number.isFinite));
  let lo = Math.min(...finite), hi = Math.max(...finite);
  if (lo === hi) { lo -= 1; hi += 1; }
  const pad = 0.05 * (hi - lo);
  lo -= pad; hi += pad;
  const x0 = x[0], x1 = x[x.length - 1];
  const m = 40;
  const px = (v) => m + (w - 2 * m) * (v - x0) / (x1 - x0);
  const py = (v) => h - m - (h - 2 * m) * (v - lo) / (hi - lo);

  ctx.strokeStyle = "#999";
  ctx.lineWidth = 1;
  ctx.strokeRect(m, m, w - 2 * m, h - 2 * m);
  ctx.fillStyle = "#555";
  ctx.font = "11px system-ui";
  ctx.fillText(hi.toPrecision(3), 2, m + 4);
  ctx.fillText(lo.toPrecision(3), 2, h - m);
  ctx.fillText(x0.toPrecision(3), m, h - m + 14);
  ctx.fillText(x1.toPrecision(3), w - m - 24, h - m + 14);
  if (lo < 0 && hi > 0) {
    ctx.beginPath();
    ctx.moveTo(m, py(0));
    ctx.lineTo(w - m, py(0));
    ctx.stroke();
  }

  legend.textContent = "";
  lines.forEach((l, k) => {
    ctx.strokeStyle = COLORS[k % COLORS.length];
    ctx.lineWidth = 1.5;
    ctx.setLineDash(l.dashed ? [5, 4] : []);
    ctx.beginPath();
    let pen = false;
    x.forEach((xv, i) => {
      const yv = l.y[i];
      if (!Number.isFinite(yv)) { pen = false; return; }
      if (pen) ctx.lineTo(px(xv), py(yv)); else ctx.moveTo(px(xv), py(yv));
      pen = true;
    });
    ctx.stroke();
    const s = document.createElement("span");
    s.style.color = COLORS[k % COLORS.length];
    s.textContent = (l.dashed ? "- - " : "— ") + l.label;
    legend.append(s);
  });
  ctx.setLineDash([]);
}

const fmt = (v) => (Number.isFinite(v) ? v.toExponential(2) : "n/a");

// Runs `work` after the status line has been painted.
function run(form, status, work) {
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const values = Object.fromEntries(new FormData(form));
    status.textContent = "working…";
    setTimeout(() => {
      const t0 = performance.now();
      try {
        const text = work(values);
        status.textContent = `${text}\n${((performance.now() - t0) / 1000).toFixed(2)} s`;
      } catch (err) {
        status.textContent = `error: ${err.message ?? err}`;
      }
    }, 20);
  });
}

function wire() {
  const $ = (id) => document.getElementById(id);

  run($("deriv-form"), $("deriv-status"), (v) => {
    const c = derivative_curve(v.alpha, v.func, +v.b, +v.n, +v.width, 400);
    plot($("deriv-plot"), $("deriv-legend"), c.x, [
      { label: "u", y: c.u },
      { label: `D^${c.order} u`, y: c.du },
      { label: "closed form", y: c.exact, dashed: true },
    ]);
    return `α = ${c.order}, largest deviation from the closed form ${fmt(c.error)}`;
  });

  run($("fft-form"), $("fft-status"), (v) => {
    const r = compare_fft(v.alpha, +v.L, +v.bits, +v.width);
    plot($("fft-plot"), $("fft-legend"), r.x, [
      { label: "multi-domain", y: r.spectral },
      { label: "DFT", y: r.dft, dashed: true },
    ]);
    return `largest gap ${fmt(r.max_difference)}, DFT error against the closed form ${fmt(r.dft_error)}`;
  });

  run($("soliton-form"), $("soliton-status"), (v) => {
    const s = solve_soliton(v.alpha, +v.n, +v.width, 400);
    plot($("soliton-plot"), $("soliton-legend"), s.x, [{ label: "Q", y: s.profile }]);
    const res = Array.from(s.residuals).map(fmt).join(" → ");
    return `orders ${s.orders.join(", ")}; ${s.converged ? "converged" : "not converged"}\n` +
      `residuals ${res}\npeak ${s.peak.toFixed(6)}, mass ${s.mass.toFixed(6)}`;
  });
}

init().then(wire, (err) => {
  document.body.prepend(`could not load the WebAssembly module: ${err}`);
});
