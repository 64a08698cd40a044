import init, { exponent_curves, simulate_field, lifespan_scan } from "./pkg/semiwave_web.js";

const num = (id) => parseFloat(document.getElementById(id).value);
const model = () => [num("p"), num("q"), num("r"), num("A"), num("B"), document.getElementById("family").value];

function drawCurves() {
  const canvas = document.getElementById("curve-canvas");
  const ctx = canvas.getContext("2d");
  const r = num("r");
  const zero = document.getElementById("family").value !== "bump";
  const data = exponent_curves(r, zero, 2.05, r + 2, 200);
  let kMax = 0;
  for (let j = 0; j < data.length; j += 3) kMax = Math.max(kMax, data[j + 1] || 0, data[j + 2] || 0);
  const sx = (s) => 40 + ((s - 2) / r) * (canvas.width - 60);
  const sy = (k) => canvas.height - 30 - (k / (kMax * 1.1)) * (canvas.height - 50);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#eee";
  ctx.fillRect(sx((r + 1) / 2), 10, sx(r) - sx((r + 1) / 2), canvas.height - 40);
  for (const [offset, colour, name] of [[1, "#c03", "sharp law"], [2, "#36c", "general theory"]]) {
    ctx.strokeStyle = colour;
    ctx.beginPath();
    for (let j = 0; j < data.length; j += 3) {
      const [x, y] = [sx(data[j]), sy(data[j + offset])];
      if (j === 0) ctx.moveTo(x, y); else ctx.lineTo(x, y);
    }
    ctx.stroke();
    ctx.fillStyle = colour;
    ctx.fillText(name, canvas.width - 120, 20 + 14 * offset);
  }
  ctx.fillStyle = "#222";
  ctx.fillText("p + q", canvas.width - 50, canvas.height - 8);
  ctx.fillText(`k (max ${kMax.toFixed(2)})`, 4, 14);
}

function drawField() {
  const [p, q, r, a, b, family] = model();
  const canvas = document.getElementById("field-canvas");
  const info = document.getElementById("field-info");
  let image;
  try {
    image = simulate_field(p, q, r, a, b, family, num("eps"), num("tmax"), 0.05, canvas.width, canvas.height);
  } catch (e) {
    info.textContent = String(e);
    return;
  }
  const values = image.values();
  let peak = 0;
  for (const v of values) if (Number.isFinite(v)) peak = Math.max(peak, Math.abs(v));
  const ctx = canvas.getContext("2d");
  const pixels = ctx.createImageData(image.width, image.height);
  for (let row = 0; row < image.height; row++) {
    for (let col = 0; col < image.width; col++) {
      const v = values[row * image.width + col];
      const s = Number.isFinite(v) ? Math.sign(v) * Math.sqrt(Math.abs(v) / peak) : 1;
      const k = 4 * ((image.height - 1 - row) * image.width + col);
      pixels.data[k] = s > 0 ? 255 : 255 * (1 + s);
      pixels.data[k + 1] = 255 * (1 - Math.abs(s));
      pixels.data[k + 2] = s < 0 ? 255 : 255 * (1 - s);
      pixels.data[k + 3] = 255;
    }
  }
  ctx.putImageData(pixels, 0, 0);
  const crossing = Number.isNaN(image.crossing) ? "none" : image.crossing.toFixed(3);
  info.textContent = `t ≤ ${image.tEnd.toFixed(2)}, |x| ≤ ${image.xMax.toFixed(2)}, max|u| = ${peak.toExponential(3)}, threshold crossing: ${crossing}`;
  image.free();
}

function runScan() {
  const [p, q, r, a, b, family] = model();
  const out = document.getElementById("scan-out");
  const count = Math.max(2, Math.round(num("scan-count")));
  let v;
  try {
    v = lifespan_scan(p, q, r, a, b, family, num("scan-eps"), num("scan-ratio"), count, 0.04, 400);
  } catch (e) {
    out.textContent = String(e);
    return;
  }
  const lines = ["eps          T_num"];
  for (let j = 0; j < 2 * count; j += 2) lines.push(`${v[j].toExponential(4)}  ${Number.isNaN(v[j + 1]) ? "> 400" : v[j + 1].toFixed(3)}`);
  lines.push(`fitted k = ${(-v[2 * count]).toFixed(4)}, predicted k = ${v[2 * count + 1].toFixed(4)}`);
  out.textContent = lines.join("\n");
}

await init();
document.getElementById("curves").addEventListener("click", drawCurves);
document.getElementById("field").addEventListener("click", drawField);
document.getElementById("scan").addEventListener("click", runScan);
drawCurves();
