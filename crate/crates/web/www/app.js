import init, { rankTerms, highlightTerms, prCurve } from "./pkg/keyphrase_web.js";

const $ = (id) => document.getElementById(id);

function fail(target, err) {
  target.innerHTML = "";
  const p = document.createElement("p");
  p.className = "error";
  p.textContent = String(err.message ?? err);
  target.append(p);
}

function cell(tag, text) {
  const c = document.createElement(tag);
  c.textContent = text;
  return c;
}

function showTerms() {
  const out = $("terms");
  try {
    const rows = JSON.parse(rankTerms($("doc").value, $("bg").value, $("sort").value, Number($("top").value)));
    const cols = ["phrase", "t_doc", "t_ref", "log_tf", "tf_idf", "g2", "bm25", "log_odds", "commonness"];
    const table = document.createElement("table");
    const head = table.insertRow();
    cols.forEach((c) => head.append(cell("th", c)));
    for (const r of rows) {
      const tr = table.insertRow();
      cols.forEach((c) => tr.append(cell("td", typeof r[c] === "number" && c !== "t_doc" && c !== "t_ref" ? r[c].toFixed(3) : r[c])));
    }
    out.replaceChildren(table);
  } catch (e) {
    fail(out, e);
  }
}

function showSpans() {
  const out = $("spans");
  try {
    const sentences = JSON.parse(highlightTerms($("tagged").value));
    out.replaceChildren(
      ...sentences.map((tokens) => {
        const line = document.createElement("p");
        for (const t of tokens) {
          const s = document.createElement("span");
          if (t.technical !== null) s.classList.add("tech");
          if (t.compound !== null) s.classList.add("comp");
          s.textContent = t.word;
          s.append(cell("small", t.tag));
          line.append(s, " ");
        }
        return line;
      }),
    );
  } catch (e) {
    fail(out, e);
  }
}

function svg(name, attrs, text) {
  const el = document.createElementNS("http://www.w3.org/2000/svg", name);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
  if (text !== undefined) el.textContent = text;
  return el;
}

function showCurve() {
  const plot = $("plot");
  const [x0, y0, w, h] = [40, 20, 300, 240];
  const x = (r) => x0 + r * w;
  const y = (p) => y0 + (1 - p) * h;
  try {
    const curve = JSON.parse(prCurve($("scores").value));
    $("auc").textContent = `AUC ${curve.auc.toFixed(4)} over ${curve.points.length} thresholds`;
    const pts = curve.points;
    const path = [[0, pts[0].precision], ...pts.map((p) => [p.recall, p.precision])];
    plot.replaceChildren(
      svg("rect", { x: x0, y: y0, width: w, height: h, fill: "none", stroke: "#999" }),
      svg("polyline", {
        points: path.map(([r, p]) => `${x(r)},${y(p)}`).join(" "),
        fill: "none",
        stroke: "#1565c0",
        "stroke-width": 2,
      }),
      ...pts.map((p) => svg("circle", { cx: x(p.recall), cy: y(p.precision), r: 3, fill: "#1565c0" }, undefined)),
      svg("text", { x: x0 + w / 2, y: y0 + h + 30, "text-anchor": "middle" }, "recall"),
      svg("text", { x: 12, y: y0 + h / 2, transform: `rotate(-90 12 ${y0 + h / 2})`, "text-anchor": "middle" }, "precision"),
      ...[0, 0.5, 1].flatMap((v) => [
        svg("text", { x: x(v), y: y0 + h + 14, "text-anchor": "middle" }, v),
        svg("text", { x: x0 - 6, y: y(v) + 4, "text-anchor": "end" }, v),
      ]),
    );
  } catch (e) {
    $("auc").textContent = "";
    plot.replaceChildren(svg("text", { x: 10, y: 20, fill: "#b00" }, String(e.message ?? e)));
  }
}

await init();
$("rank").onclick = showTerms;
$("highlight").onclick = showSpans;
$("curve").onclick = showCurve;
showTerms();
showSpans();
showCurve();
