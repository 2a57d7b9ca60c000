import { describe, expect, it } from "vitest";

import { pollResult, type PollTrace } from "../src/poll.js";
import { MockApi } from "./mockApi.js";

describe("pollResult", () => {
  it("backs off from 1s toward 5s and resolves with the result", async () => {
    const api = new MockApi(() => 0.99); // success after 3 pending polls
    await api.createProject({
      name: "r",
      bounding_box: [50, -115, 52, -113],
      declared_available_sources: ["twitter"],
    });
    await api.selectService("p0", "TST");
    await api.setContext("p0", ["twitter"], {
      twitter: { keywords: ["x"], max_documents: 5 },
    });
    await api.startRun("p0", false);
    // stretch the pending window so several delays accumulate
    const project = api.projects.get("p0");
    if (project) project.pendingPolls = 7;

    const trace: PollTrace = { delays: [] };
    const result = await pollResult(
      api,
      "p0",
      { sleep: async () => {} },
      trace,
    );
    expect(result.requirements.length).toBeGreaterThan(0);
    expect(trace.delays[0]).toBe(1000);
    expect(trace.delays).toEqual([1000, 1500, 2250, 3375, 5000, 5000]);
  });

  it("throws when the run fails", async () => {
    const api = new MockApi(() => 0.0); // willFail, completes on first poll
    await api.createProject({
      name: "r",
      bounding_box: [50, -115, 52, -113],
      declared_available_sources: ["twitter"],
    });
    await api.selectService("p0", "TST");
    await api.setContext("p0", ["twitter"], {
      twitter: { keywords: ["x"], max_documents: 5 },
    });
    await api.startRun("p0", false);
    await expect(
      pollResult(api, "p0", { sleep: async () => {} }),
    ).rejects.toThrow(/empty corpus/);
  });
});
