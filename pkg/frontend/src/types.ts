/** Payload shapes exchanged with the gateway API. */

export type ProjectState =
  | "Created"
  | "ServiceSelected"
  | "SourcesSelected"
  | "ContextSet"
  | "Running"
  | "Complete"
  | "Failed";

export type ApiErrorCode =
  | "validation"
  | "state"
  | "eligibility"
  | "schema"
  | "not_found"
  | "internal";

export interface ApiError {
  code: ApiErrorCode;
  message: string;
  detail: Record<string, unknown>;
}

export interface RegionDraft {
  name: string;
  bounding_box: [number, number, number, number];
  declared_available_sources: string[];
}

export interface ProjectSnapshot {
  id: string;
  state: ProjectState;
  service_id: string | null;
  selected_sources: string[];
  failure_reason: string | null;
}

export interface ServiceInfo {
  id: string;
  display_name: string;
  required_source_kinds: string[];
  min_documents: number;
}

export interface FieldInfo {
  name: string;
  value_kind: "text" | "text_list" | "date_range" | "geo_area" | "positive_int";
  required: boolean;
}

export interface SourceInfo {
  kind: string;
  display_name: string;
  context_schema: FieldInfo[];
}

export interface ContextDraft {
  keywords?: string[];
  hashtags?: string[];
  date_range?: [string, string] | null;
  language?: string;
  max_documents?: number;
  geo_filter?: [number, number, number] | null;
}

export interface RequirementRecord {
  id: string;
  text: string;
  kind: "FR" | "NFR";
  nfr_category: string | null;
  confidence: number;
  provenance: { doc_ids: string[]; topic_index: number };
  service_id: string;
}

export interface TopicRecord {
  topic_index: number;
  top_terms: [string, number][];
  representative_doc_ids: string[];
  expanded_terms: string[];
}

export interface ResultRecord {
  requirements: RequirementRecord[];
  topics: TopicRecord[];
  rules: unknown[];
  rejected: { doc_id: string; reason: string }[];
  run_config: Record<string, unknown>;
}

/** Outcome of one API call: either data or an inline-renderable error. */
export type ApiOutcome<T> = { ok: true; value: T } | { ok: false; error: ApiError };

/** GET result: completed payload, or "keep polling" while the run is live. */
export type ResultOutcome =
  | { status: "ready"; result: ResultRecord }
  | { status: "pending"; state: ProjectState }
  | { status: "failed"; message: string };

export interface ApiClient {
  createProject(region: RegionDraft): Promise<
    ApiOutcome<{ project: ProjectSnapshot; eligible_services: ServiceInfo[] }>
  >;
  getProject(projectId: string): Promise<ApiOutcome<ProjectSnapshot>>;
  selectService(projectId: string, serviceId: string): Promise<ApiOutcome<ProjectSnapshot>>;
  listSources(projectId: string): Promise<ApiOutcome<SourceInfo[]>>;
  setContext(
    projectId: string,
    sources: string[],
    contexts: Record<string, ContextDraft>,
  ): Promise<ApiOutcome<ProjectSnapshot>>;
  startRun(projectId: string, reset: boolean): Promise<ApiOutcome<{ state: string }>>;
  getResult(projectId: string): Promise<ResultOutcome>;
}
