import { ApiClient } from "./api.js";
import { App } from "./app.js";

const params = new URLSearchParams(window.location.search);
const sentenceId = params.get("id");
const expert = params.get("expert") === "1" || params.get("expert") === "true";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app container");
}
if (!sentenceId) {
  root.textContent = "Add ?id=<sentence id> to the URL (and &expert=1 for expert mode).";
} else {
  const app = new App(root, new ApiClient(""), sentenceId, expert);
  void app.load();
}
