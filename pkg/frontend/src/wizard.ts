/** Wizard state machine.
 *
 * The wizard is a thin client over the gateway: every transition that
 * matters is an API call, and the client only issues a call when the
 * server-side project state makes it legal, so an honored machine can
 * never draw an ordering rejection.  Out-of-order actions become local
 * no-ops with a visible message.  Refresh rebuilds the step purely from
 * the server-side project state; client-only progress (drafts, a step
 * entered but not submitted) does not survive it.
 */

import type {
  ApiClient,
  ApiError,
  ContextDraft,
  ProjectSnapshot,
  RegionDraft,
  ResultRecord,
  ServiceInfo,
  SourceInfo,
} from "./types.js";

export type Step = "Region" | "Services" | "Sources" | "Context" | "Running" | "Results";

const STEP_ORDER: Step[] = ["Region", "Services", "Sources", "Context", "Running", "Results"];

export function stepIndex(step: Step): number {
  return STEP_ORDER.indexOf(step);
}

export interface WizardState {
  step: Step;
  project: ProjectSnapshot | null;
  eligibleServices: ServiceInfo[];
  availableSources: SourceInfo[];
  drafts: {
    sources: string[];
    contexts: Record<string, ContextDraft>;
  };
  result: ResultRecord | null;
  lastError: string | null;
}

export type WizardAction =
  | { kind: "submit_region"; region: RegionDraft }
  | { kind: "select_service"; serviceId: string }
  | { kind: "choose_sources"; sources: string[] }
  | { kind: "submit_context"; contexts: Record<string, ContextDraft> }
  | { kind: "start_run" }
  | { kind: "rerun" }
  | { kind: "poll_result" }
  | { kind: "refresh" };

export function initialState(): WizardState {
  return {
    step: "Region",
    project: null,
    eligibleServices: [],
    availableSources: [],
    drafts: { sources: [], contexts: {} },
    result: null,
    lastError: null,
  };
}

/** The canonical step for a server-side project state. */
export function stepFromProject(project: ProjectSnapshot | null): Step {
  if (project === null) return "Region";
  switch (project.state) {
    case "Created":
      return "Services";
    case "ServiceSelected":
      return "Sources";
    case "SourcesSelected":
    case "ContextSet":
      return "Context";
    case "Running":
      return "Running";
    case "Complete":
      return "Results";
    case "Failed":
      return "Context";
  }
}

/** The furthest step the server-side state permits the client to show. */
export function furthestPermittedStep(project: ProjectSnapshot | null): Step {
  if (project === null) return "Region";
  switch (project.state) {
    case "Created":
      return "Services";
    case "ServiceSelected": // sources are chosen client-side, context next
      return "Context";
    case "SourcesSelected":
    case "ContextSet":
    case "Failed":
      return "Context";
    case "Running":
      return "Running";
    case "Complete":
      return "Results";
  }
}

function noop(state: WizardState, message: string): WizardState {
  return { ...state, lastError: message };
}

function inlineError(state: WizardState, error: ApiError): WizardState {
  return { ...state, lastError: error.message };
}

function requiredFieldsMissing(
  source: SourceInfo | undefined,
  draft: ContextDraft | undefined,
): string | null {
  if (!source) return null;
  const populated: Record<string, boolean> = {
    keywords: (draft?.keywords ?? []).length > 0,
    hashtags: (draft?.hashtags ?? []).length > 0,
    date_range: draft?.date_range != null,
    language: (draft?.language ?? "en").length > 0,
    max_documents: (draft?.max_documents ?? 0) >= 1,
    geo_area: draft?.geo_filter != null,
  };
  for (const field of source.context_schema) {
    if (field.required && !populated[field.name]) {
      return `${field.name} required`;
    }
  }
  return null;
}

/** Apply one user action: pure aside from the API calls it may issue. */
export async function nextStep(
  state: WizardState,
  action: WizardAction,
  client: ApiClient,
): Promise<WizardState> {
  switch (action.kind) {
    case "submit_region": {
      if (state.step !== "Region") return noop(state, "region is already set");
      const out = await client.createProject(action.region);
      if (!out.ok) return inlineError(state, out.error);
      return {
        ...initialState(),
        step: "Services",
        project: out.value.project,
        eligibleServices: out.value.eligible_services,
      };
    }

    case "select_service": {
      if (state.step !== "Services" || state.project?.state !== "Created") {
        return noop(state, "select a service from the services step");
      }
      if (!state.eligibleServices.some((svc) => svc.id === action.serviceId)) {
        return noop(state, `service ${action.serviceId} is not offered here`);
      }
      const out = await client.selectService(state.project.id, action.serviceId);
      if (!out.ok) return inlineError(state, out.error);
      const sources = await client.listSources(out.value.id);
      if (!sources.ok) return inlineError({ ...state, project: out.value }, sources.error);
      return {
        ...state,
        step: "Sources",
        project: out.value,
        availableSources: sources.value,
        lastError: null,
      };
    }

    case "choose_sources": {
      if (state.step !== "Sources" || state.project?.state !== "ServiceSelected") {
        return noop(state, "choose sources from the sources step");
      }
      if (action.sources.length === 0) {
        return noop(state, "select at least one data source");
      }
      const known = new Set(state.availableSources.map((src) => src.kind));
      const unknown = action.sources.filter((kind) => !known.has(kind));
      if (unknown.length > 0) {
        return noop(state, `source ${unknown[0]} is not available here`);
      }
      // purely client-side: context forms come next; nothing to persist yet
      return {
        ...state,
        step: "Context",
        drafts: { ...state.drafts, sources: [...action.sources] },
        lastError: null,
      };
    }

    case "submit_context": {
      if (state.step !== "Context" || state.project?.state !== "ServiceSelected") {
        return noop(state, "contexts can only be submitted right after choosing sources");
      }
      if (state.drafts.sources.length === 0) {
        return noop(state, "select at least one data source");
      }
      const bySource = new Map(state.availableSources.map((src) => [src.kind, src]));
      for (const kind of state.drafts.sources) {
        const missing = requiredFieldsMissing(bySource.get(kind), action.contexts[kind]);
        if (missing) return noop(state, `${kind}: ${missing}`);
      }
      const out = await client.setContext(
        state.project.id,
        state.drafts.sources,
        action.contexts,
      );
      if (!out.ok) return inlineError(state, out.error);
      return {
        ...state,
        step: "Context",
        project: out.value,
        drafts: { ...state.drafts, contexts: action.contexts },
        lastError: null,
      };
    }

    case "start_run": {
      if (state.step !== "Context" || state.project?.state !== "ContextSet") {
        return noop(state, "finish characterizing the context before running");
      }
      const out = await client.startRun(state.project.id, false);
      if (!out.ok) return inlineError(state, out.error);
      return {
        ...state,
        step: "Running",
        project: { ...state.project, state: "Running" },
        lastError: null,
      };
    }

    case "rerun": {
      const serverState = state.project?.state;
      if (!state.project || (serverState !== "Complete" && serverState !== "Failed")) {
        return noop(state, "only a finished run can be restarted");
      }
      const out = await client.startRun(state.project.id, true);
      if (!out.ok) return inlineError(state, out.error);
      return {
        ...state,
        step: "Running",
        project: { ...state.project, state: "Running" },
        result: null,
        lastError: null,
      };
    }

    case "poll_result": {
      if (state.step !== "Running" || state.project === null) {
        return noop(state, "nothing is running");
      }
      const outcome = await client.getResult(state.project.id);
      if (outcome.status === "pending") return state;
      if (outcome.status === "failed") {
        return {
          ...state,
          step: "Context",
          project: { ...state.project, state: "Failed" },
          lastError: outcome.message,
        };
      }
      return {
        ...state,
        step: "Results",
        project: { ...state.project, state: "Complete" },
        result: outcome.result,
        lastError: null,
      };
    }

    case "refresh": {
      if (state.project === null) return { ...initialState() };
      const project = await client.getProject(state.project.id);
      if (!project.ok) return inlineError(state, project.error);
      return rebuildFromProject(state, project.value, client);
    }
  }
}

/** Restore the wizard from the server-side project state (page refresh). */
async function rebuildFromProject(
  state: WizardState,
  project: ProjectSnapshot,
  client: ApiClient,
): Promise<WizardState> {
  const step = stepFromProject(project);
  const next: WizardState = {
    ...initialState(),
    step,
    project,
    eligibleServices: state.eligibleServices,
    lastError: project.state === "Failed" ? project.failure_reason : null,
  };
  if (project.service_id !== null && project.state !== "Created") {
    const sources = await client.listSources(project.id);
    if (sources.ok) next.availableSources = sources.value;
  }
  if (project.state === "Complete") {
    const outcome = await client.getResult(project.id);
    if (outcome.status === "ready") next.result = outcome.result;
  }
  return next;
}
