/** fetch-based gateway client.
 *
 * The UI talks only to the gateway; base URL and the optional bearer
 * token come from runtime config (see `resolveConfig`).
 */

import type {
  ApiClient,
  ApiError,
  ApiOutcome,
  ContextDraft,
  ProjectSnapshot,
  ProjectState,
  RegionDraft,
  ResultOutcome,
  ResultRecord,
  ServiceInfo,
  SourceInfo,
} from "./types.js";

export interface ClientConfig {
  baseUrl: string;
  token?: string;
}

declare global {
  interface Window {
    RETTA_API_BASE?: string;
    RETTA_API_TOKEN?: string;
  }
}

/** Runtime config: window globals (set by the hosting page) with defaults. */
export function resolveConfig(): ClientConfig {
  if (typeof window !== "undefined") {
    return {
      baseUrl: window.RETTA_API_BASE ?? "http://127.0.0.1:8080",
      token: window.RETTA_API_TOKEN,
    };
  }
  return { baseUrl: "http://127.0.0.1:8080" };
}

function asApiError(status: number, body: unknown): ApiError {
  const record = (body ?? {}) as Partial<ApiError>;
  return {
    code: record.code ?? (status === 404 ? "not_found" : "internal"),
    message: record.message ?? `request failed with status ${status}`,
    detail: record.detail ?? {},
  };
}

export class HttpApiClient implements ApiClient {
  constructor(private config: ClientConfig) {}

  private async call<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<{ status: number; json: T | ApiError }> {
    const headers: Record<string, string> = { "content-type": "application/json" };
    if (this.config.token) headers["authorization"] = `Bearer ${this.config.token}`;
    const response = await fetch(`${this.config.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const json = (await response.json().catch(() => ({}))) as T | ApiError;
    return { status: response.status, json };
  }

  private async outcome<T>(method: string, path: string, body?: unknown): Promise<ApiOutcome<T>> {
    const { status, json } = await this.call<T>(method, path, body);
    if (status >= 200 && status < 300) return { ok: true, value: json as T };
    return { ok: false, error: asApiError(status, json) };
  }

  createProject(region: RegionDraft) {
    return this.outcome<{ project: ProjectSnapshot; eligible_services: ServiceInfo[] }>(
      "POST",
      "/projects",
      { region },
    );
  }

  async getProject(projectId: string): Promise<ApiOutcome<ProjectSnapshot>> {
    const out = await this.outcome<{ project: ProjectSnapshot }>(
      "GET",
      `/projects/${projectId}`,
    );
    return out.ok ? { ok: true, value: out.value.project } : out;
  }

  async selectService(projectId: string, serviceId: string): Promise<ApiOutcome<ProjectSnapshot>> {
    const out = await this.outcome<{ project: ProjectSnapshot }>(
      "POST",
      `/projects/${projectId}/service`,
      { service_id: serviceId },
    );
    return out.ok ? { ok: true, value: out.value.project } : out;
  }

  async listSources(projectId: string): Promise<ApiOutcome<SourceInfo[]>> {
    const out = await this.outcome<{ sources: SourceInfo[] }>(
      "GET",
      `/projects/${projectId}/sources`,
    );
    return out.ok ? { ok: true, value: out.value.sources } : out;
  }

  async setContext(
    projectId: string,
    sources: string[],
    contexts: Record<string, ContextDraft>,
  ): Promise<ApiOutcome<ProjectSnapshot>> {
    const out = await this.outcome<{ project: ProjectSnapshot }>(
      "POST",
      `/projects/${projectId}/context`,
      { sources, contexts },
    );
    return out.ok ? { ok: true, value: out.value.project } : out;
  }

  startRun(projectId: string, reset: boolean) {
    return this.outcome<{ state: string }>("POST", `/projects/${projectId}/run`, { reset });
  }

  async getResult(projectId: string): Promise<ResultOutcome> {
    const { status, json } = await this.call<{ result: ResultRecord }>(
      "GET",
      `/projects/${projectId}/result`,
    );
    if (status === 200) return { status: "ready", result: (json as { result: ResultRecord }).result };
    const error = asApiError(status, json);
    const state = (error.detail as { state?: string }).state;
    if (status === 409 && state === "Failed") {
      return { status: "failed", message: error.message };
    }
    if (status === 409) {
      return { status: "pending", state: (state as ProjectState) ?? "Running" };
    }
    return { status: "failed", message: error.message };
  }
}
