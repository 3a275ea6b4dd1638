/** Pure board presentation logic: view models, metric deltas, export.
 * Everything here maps server state to display data; no metric is ever
 * computed from the board itself. */

import {
  METRIC_NAMES,
  type BoardState,
  type MetricName,
  type Metrics,
  type PartitionFile,
} from "./types";

/** Which way each metric improves, for delta coloring. */
export const METRIC_DIRECTION: Record<MetricName, "higher" | "lower"> = {
  sm: "higher",
  icp: "lower",
  bcp: "lower",
  ifn: "lower",
  ned: "lower",
};

export type DeltaTone = "good" | "bad" | "neutral";

export interface MetricRow {
  name: MetricName;
  value: string;
  delta: string;
  tone: DeltaTone;
}

export interface ChipView {
  name: string;
  isInterface: boolean;
}

export interface BadgeView {
  label: string;
  count: number;
}

export interface ColumnView {
  id: number;
  title: string;
  chips: ChipView[];
  badges: BadgeView[];
}

export function formatValue(value: number): string {
  return value.toFixed(6);
}

export function formatDelta(delta: number): string {
  const rendered = Math.abs(delta).toFixed(6);
  return (delta < 0 ? "-" : "+") + rendered;
}

export function deltaTone(name: MetricName, delta: number): DeltaTone {
  if (delta === 0) return "neutral";
  const improved =
    METRIC_DIRECTION[name] === "higher" ? delta > 0 : delta < 0;
  return improved ? "good" : "bad";
}

/** Metric panel rows; `previous` is the board's metrics before the last
 * edit, or null when there is no edit to compare against (zero deltas). */
export function metricRows(current: Metrics, previous: Metrics | null): MetricRow[] {
  return METRIC_NAMES.map((name) => {
    const delta = previous === null ? 0 : current[name] - previous[name];
    return {
      name,
      value: formatValue(current[name]),
      delta: formatDelta(delta),
      tone: deltaTone(name, delta),
    };
  });
}

export function buildColumns(state: BoardState): ColumnView[] {
  return state.partitions.map((partition) => ({
    id: partition.id,
    title: `Partition ${partition.id}`,
    chips: partition.classes.map((name) => ({
      name,
      isInterface: partition.interfaces.includes(name),
    })),
    badges: partition.tuples.map((tuple) => ({
      label: tuple.use_cases.join(", "),
      count: tuple.count,
    })),
  }));
}

/** True when the class already lives in the target column (no request). */
export function isNoOpMove(state: BoardState, className: string, toId: number): boolean {
  const home = state.partitions.find((p) => p.classes.includes(className));
  return home !== undefined && home.id === toId;
}

/** Partition file accepted by `tracepart metrics --partitions`, in the
 * exact order the board displays (ids ascending, classes as served). */
export function exportPartitionFile(state: BoardState): PartitionFile {
  return {
    partitions: state.partitions.map((p) => ({ classes: [...p.classes] })),
  };
}
