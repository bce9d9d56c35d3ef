// Build with `wasm-pack build --target web crates/wasm --out-dir www/pkg`.
import init, { Stepper, runProgram, analyze, presetTable4, presetExample6 } from "./pkg/tcla_wasm.js";

const $ = (id) => document.getElementById(id);
let stepper = null;

function showError(e) {
  $("message").textContent = e ? String(e) : "";
}

function formatStore(store) {
  const attacks = store.attacks.map(([a, b]) => `(${a},${b})`).join(", ");
  return `arguments: {${store.arguments.join(", ")}}\nattacks:   {${attacks}}`;
}

function formatTimeline(rows, end) {
  const width = Math.max(0, ...rows.map((r) => r.argument.length));
  return rows
    .map((r) => {
      let bar = "";
      for (let t = 0; t < Math.max(end, 1); t++) {
        const on = r.intervals.some(([enter, exit]) => enter <= t && (exit === null || t < exit));
        bar += on ? "#" : ".";
      }
      return `${r.argument.padStart(width)} |${bar}|`;
    })
    .join("\n");
}

function renderRun(result) {
  const trace = result.trace;
  const last = trace.steps.length ? trace.steps[trace.steps.length - 1] : null;
  $("store").textContent = formatStore(last ? last.store : trace.initial);
  $("timeline").textContent = formatTimeline(result.timeline, last ? last.clock + 1 : 1);
  $("log").textContent = trace.steps
    .map((s, i) => `---- step ${i + 1} (clock ${s.clock}) ----\n` +
      s.events.map((e) => `  ${e.rule} at ${e.path}${e.detail ? ": " + e.detail : ""}`).join("\n"))
    .concat([`==== ${trace.terminal} ====`])
    .join("\n");
  $("choices").textContent = "";
}

function renderView(view) {
  $("store").textContent = formatStore(view.store);
  $("timeline").textContent = formatTimeline(view.timeline, view.clock + 1);
  const log = $("log");
  if (view.last_choice !== null) {
    log.textContent += `---- clock ${view.clock} (choice ${view.last_choice}) ----\n` +
      view.events.map((e) => `  ${e.rule} at ${e.path}${e.detail ? ": " + e.detail : ""}`).join("\n") + "\n";
  }
  const box = $("choices");
  box.textContent = "";
  for (const c of view.choices) {
    const b = document.createElement("button");
    b.textContent = `[${c.index}] ${c.rule} at ${c.path}${c.detail ? ": " + c.detail : ""}`;
    b.onclick = () => step(c.index);
    box.appendChild(b);
  }
  if (view.is_terminal) {
    log.textContent += `==== ${view.terminal} at clock ${view.clock} ====\n`;
  }
  $("step").disabled = view.is_terminal;
}

function step(choice) {
  try {
    renderView(JSON.parse(stepper.step(choice)));
    showError(null);
  } catch (e) {
    showError(e);
  }
}

await init();
$("source").value = presetTable4();
$("preset-table4").onclick = () => ($("source").value = presetTable4());
$("preset-example6").onclick = () => ($("source").value = presetExample6());

$("run").onclick = () => {
  try {
    renderRun(JSON.parse(runProgram($("source").value, BigInt($("seed").value), 1000)));
    $("step").disabled = true;
    showError(null);
  } catch (e) {
    showError(e);
  }
};

$("start").onclick = () => {
  try {
    stepper = new Stepper($("source").value, BigInt($("seed").value));
    $("log").textContent = "";
    renderView(JSON.parse(stepper.state()));
    showError(null);
  } catch (e) {
    showError(e);
  }
};

$("step").onclick = () => step(-1);

$("analyze").onclick = () => {
  try {
    const r = JSON.parse(analyze($("framework").value, $("semantics").value));
    $("analysis").textContent = r.extensions.map((e) => `{${e.join(", ")}}`).join("\n") || "(no extensions)";
    showError(null);
  } catch (e) {
    $("analysis").textContent = String(e);
  }
};
