/** DOM wiring: a single render loop over the wizard state.
 *
 * All decisions live in wizard.ts / render.ts; this file only reads form
 * inputs, dispatches actions, and paints the current step.
 */

import { HttpApiClient, resolveConfig } from "./client.js";
import { pollResult } from "./poll.js";
import { renderResults } from "./render.js";
import type { ContextDraft } from "./types.js";
import { initialState, nextStep, type WizardAction, type WizardState } from "./wizard.js";

const client = new HttpApiClient(resolveConfig());
let state: WizardState = initialState();
let polling = false;

async function dispatch(action: WizardAction) {
  state = await nextStep(state, action, client);
  paint();
  if (state.step === "Running" && !polling && state.project) {
    polling = true;
    try {
      await pollResult(client, state.project.id);
    } catch {
      // failure surfaces through the poll_result transition below
    }
    polling = false;
    await dispatch({ kind: "poll_result" });
  }
}

function el(tag: string, text?: string, cls?: string): HTMLElement {
  const node = document.createElement(tag);
  if (text !== undefined) node.textContent = text;
  if (cls) node.className = cls;
  return node;
}

function listInput(value: string): string[] {
  return value
    .split(",")
    .map((s) => s.trim())
    .filter((s) => s.length > 0);
}

function paintRegion(root: HTMLElement) {
  root.append(el("h2", "1. Where will the system be deployed?"));
  const name = document.createElement("input");
  name.placeholder = "region name";
  name.id = "region-name";
  const sources = document.createElement("input");
  sources.placeholder = "available sources (comma separated, e.g. twitter,historical)";
  sources.id = "region-sources";
  sources.size = 60;
  const go = el("button", "Create project") as HTMLButtonElement;
  go.onclick = () =>
    dispatch({
      kind: "submit_region",
      region: {
        name: name.value || "region",
        bounding_box: [50.8, -114.4, 51.3, -113.8],
        declared_available_sources: listInput(sources.value || "twitter"),
      },
    });
  root.append(name, sources, go);
}

function paintServices(root: HTMLElement) {
  root.append(el("h2", "2. Eligible services"));
  if (state.eligibleServices.length === 0) {
    root.append(el("p", "no service has enough data in this region", "hint"));
    return;
  }
  for (const svc of state.eligibleServices) {
    const b = el("button", `${svc.id} — ${svc.display_name}`) as HTMLButtonElement;
    b.onclick = () => dispatch({ kind: "select_service", serviceId: svc.id });
    root.append(b);
  }
}

function paintSources(root: HTMLElement) {
  root.append(el("h2", "3. Data sources"));
  const boxes: HTMLInputElement[] = [];
  for (const src of state.availableSources) {
    const label = el("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.value = src.kind;
    boxes.push(box);
    label.append(box, el("span", ` ${src.display_name}`));
    root.append(label, el("br"));
  }
  const go = el("button", "Continue") as HTMLButtonElement;
  go.onclick = () =>
    dispatch({
      kind: "choose_sources",
      sources: boxes.filter((b) => b.checked).map((b) => b.value),
    });
  root.append(go);
}

function paintContext(root: HTMLElement) {
  root.append(el("h2", "4. Characterize the context"));
  if (state.project?.state === "ContextSet" || state.project?.state === "Failed") {
    const run = el(
      "button",
      state.project.state === "Failed" ? "Run again" : "Run elicitation",
    ) as HTMLButtonElement;
    run.onclick = () =>
      dispatch({ kind: state.project?.state === "Failed" ? "rerun" : "start_run" });
    root.append(run);
    return;
  }
  const fields: Record<string, Record<string, HTMLInputElement>> = {};
  for (const kind of state.drafts.sources) {
    const source = state.availableSources.find((s) => s.kind === kind);
    if (!source) continue;
    root.append(el("h3", source.display_name));
    fields[kind] = {};
    for (const field of source.context_schema) {
      const input = document.createElement("input");
      input.placeholder = `${field.name}${field.required ? " (required)" : ""}`;
      input.size = 50;
      fields[kind][field.name] = input;
      root.append(input, el("br"));
    }
  }
  const go = el("button", "Save context") as HTMLButtonElement;
  go.onclick = () => {
    const contexts: Record<string, ContextDraft> = {};
    for (const [kind, inputs] of Object.entries(fields)) {
      const draft: ContextDraft = {};
      if (inputs.keywords) draft.keywords = listInput(inputs.keywords.value);
      if (inputs.hashtags) draft.hashtags = listInput(inputs.hashtags.value);
      if (inputs.language?.value) draft.language = inputs.language.value;
      if (inputs.max_documents) draft.max_documents = Number(inputs.max_documents.value) || 200;
      if (inputs.date_range?.value) {
        const [a, b] = inputs.date_range.value.split("/");
        if (a && b) draft.date_range = [a, b];
      }
      if (inputs.geo_area?.value) {
        const [lat, lon, r] = inputs.geo_area.value.split(",").map(Number);
        if (lat !== undefined && lon !== undefined && r !== undefined) {
          draft.geo_filter = [lat, lon, r];
        }
      }
      contexts[kind] = draft;
    }
    dispatch({ kind: "submit_context", contexts });
  };
  root.append(go);
}

function paintRunning(root: HTMLElement) {
  root.append(el("h2", "5. Running"), el("p", "analyzing the crowd data...", "hint"));
}

function paintResults(root: HTMLElement) {
  root.append(el("h2", "6. Requirements"));
  if (!state.result) return;
  const view = renderResults(state.result);
  if (view.emptyHint) {
    root.append(el("p", view.emptyHint, "hint"));
    return;
  }
  const tabs = [
    { title: `FRs (${view.frTab.length})`, groups: [{ category: "", rows: view.frTab }] },
    { title: "NFRs", groups: view.nfrTab },
  ];
  for (const tab of tabs) {
    root.append(el("h3", tab.title));
    for (const group of tab.groups) {
      if (group.category) root.append(el("h4", `${group.category} (${group.rows.length})`));
      for (const row of group.rows) {
        const details = el("details");
        const summary = el("summary");
        const bar = el("span", "", "bar");
        bar.style.width = `${row.confidencePercent}px`;
        summary.append(bar, el("span", ` ${row.confidencePercent}% ${row.text}`));
        details.append(
          summary,
          el("p", `documents: ${row.provenanceDocIds.join(", ")}`),
          el("p", `topic terms: ${row.topicTopTerms.join(", ")}`),
          el("p", `expanded keywords: ${row.expandedKeywords.join(", ")}`),
        );
        root.append(details);
      }
    }
  }
  const rerun = el("button", "Re-run (reset)") as HTMLButtonElement;
  rerun.onclick = () => dispatch({ kind: "rerun" });
  root.append(rerun);
}

export function paint() {
  const root = document.getElementById("app");
  if (!root) return;
  root.replaceChildren();
  if (state.lastError) root.append(el("p", state.lastError, "error"));
  switch (state.step) {
    case "Region":
      return paintRegion(root);
    case "Services":
      return paintServices(root);
    case "Sources":
      return paintSources(root);
    case "Context":
      return paintContext(root);
    case "Running":
      return paintRunning(root);
    case "Results":
      return paintResults(root);
  }
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", () => paint());
}
