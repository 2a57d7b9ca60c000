/** Poll the result endpoint while a run executes.
 *
 * Starts at one second and backs off to five (x1.5 per miss), per the
 * demo-scale polling model; there is no push channel.
 */

import type { ApiClient, ResultRecord } from "./types.js";

export interface PollOptions {
  initialMs?: number;
  maxMs?: number;
  factor?: number;
  /** test hook; defaults to setTimeout */
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export interface PollTrace {
  delays: number[];
}

export async function pollResult(
  client: ApiClient,
  projectId: string,
  options: PollOptions = {},
  trace?: PollTrace,
): Promise<ResultRecord> {
  const initial = options.initialMs ?? 1_000;
  const max = options.maxMs ?? 5_000;
  const factor = options.factor ?? 1.5;
  const sleep = options.sleep ?? defaultSleep;

  let delay = initial;
  for (;;) {
    const outcome = await client.getResult(projectId);
    if (outcome.status === "ready") return outcome.result;
    if (outcome.status === "failed") throw new Error(outcome.message);
    trace?.delays.push(delay);
    await sleep(delay);
    delay = Math.min(max, delay * factor);
  }
}
