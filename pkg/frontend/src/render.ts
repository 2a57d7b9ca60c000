/** Results view model: FR/NFR tabs with grouped, confidence-sorted rows. */

import type { RequirementRecord, ResultRecord, TopicRecord } from "./types.js";

export interface RequirementRow {
  id: string;
  text: string;
  confidencePercent: number; // bar width, 0..100
  provenanceDocIds: string[];
  topicIndex: number;
  topicTopTerms: string[];
  expandedKeywords: string[];
}

export interface NfrGroup {
  category: string;
  rows: RequirementRow[];
}

export interface ResultViewModel {
  frTab: RequirementRow[];
  nfrTab: NfrGroup[];
  rejectedCount: number;
  emptyHint: string | null;
}

function toRow(req: RequirementRecord, topics: Map<number, TopicRecord>): RequirementRow {
  const topic = topics.get(req.provenance.topic_index);
  return {
    id: req.id,
    text: req.text,
    confidencePercent: Math.round(req.confidence * 100),
    provenanceDocIds: [...req.provenance.doc_ids],
    topicIndex: req.provenance.topic_index,
    topicTopTerms: topic ? topic.top_terms.map(([term]) => term) : [],
    expandedKeywords: topic ? [...topic.expanded_terms] : [],
  };
}

function byConfidenceDesc(a: RequirementRow, b: RequirementRow): number {
  if (a.confidencePercent !== b.confidencePercent) {
    return b.confidencePercent - a.confidencePercent;
  }
  return a.id < b.id ? -1 : a.id > b.id ? 1 : 0;
}

export function renderResults(result: ResultRecord): ResultViewModel {
  const topics = new Map(result.topics.map((t) => [t.topic_index, t]));
  const frTab = result.requirements
    .filter((r) => r.kind === "FR")
    .map((r) => toRow(r, topics))
    .sort(byConfidenceDesc);

  const grouped = new Map<string, RequirementRow[]>();
  for (const req of result.requirements) {
    if (req.kind !== "NFR") continue;
    const category = req.nfr_category ?? "other";
    const rows = grouped.get(category) ?? [];
    rows.push(toRow(req, topics));
    grouped.set(category, rows);
  }
  // larger groups first, alphabetical between equals; rows by confidence
  const nfrTab = [...grouped.entries()]
    .map(([category, rows]) => ({ category, rows: rows.sort(byConfidenceDesc) }))
    .sort((a, b) =>
      a.rows.length !== b.rows.length
        ? b.rows.length - a.rows.length
        : a.category.localeCompare(b.category),
    );

  const empty = frTab.length === 0 && nfrTab.length === 0;
  return {
    frTab,
    nfrTab,
    rejectedCount: result.rejected.length,
    emptyHint: empty
      ? "no requirements were elicited; re-characterize the context and run again"
      : null,
  };
}

/** Plain-text rendering of the view model, used for snapshot comparisons. */
export function renderResultsText(view: ResultViewModel): string {
  const lines: string[] = [];
  const bar = (pct: number) => "#".repeat(Math.round(pct / 10)).padEnd(10, ".");
  if (view.emptyHint) {
    return `(empty) ${view.emptyHint}\n`;
  }
  lines.push(`== FRs (${view.frTab.length}) ==`);
  for (const row of view.frTab) {
    lines.push(`[${bar(row.confidencePercent)}] ${row.confidencePercent}% ${row.id} ${row.text}`);
    lines.push(
      `    docs=${row.provenanceDocIds.join(",")} topic=${row.topicIndex}` +
        ` terms=${row.topicTopTerms.join(",")} keywords=${row.expandedKeywords.join(",")}`,
    );
  }
  lines.push(`== NFRs ==`);
  for (const group of view.nfrTab) {
    lines.push(`-- ${group.category} (${group.rows.length}) --`);
    for (const row of group.rows) {
      lines.push(
        `[${bar(row.confidencePercent)}] ${row.confidencePercent}% ${row.id} ${row.text}`,
      );
      lines.push(
        `    docs=${row.provenanceDocIds.join(",")} topic=${row.topicIndex}` +
          ` terms=${row.topicTopTerms.join(",")} keywords=${row.expandedKeywords.join(",")}`,
      );
    }
  }
  if (view.rejectedCount > 0) {
    lines.push(`(${view.rejectedCount} unclassifiable documents rejected)`);
  }
  return lines.join("\n") + "\n";
}
