import init, { build_code, check_mds, condition_a } from "./pkg/mdslab_demo.js";

const $ = (id) => document.getElementById(id);
const show = (json) => {
  $("out").textContent = JSON.stringify(JSON.parse(json), null, 2);
};

await init();
$("out").textContent = "ready";

$("build").onclick = () => {
  const r = build_code(Number($("q").value), Number($("k").value), $("kind").value);
  const parsed = JSON.parse(r);
  if (parsed.text) $("matrix").value = parsed.text;
  show(r);
};
$("check").onclick = () => show(check_mds($("matrix").value));
$("conda").onclick = () => show(condition_a($("matrix").value));
