/** JSON shapes served by the partition refinement API. */

export const METRIC_NAMES = ["sm", "icp", "bcp", "ifn", "ned"] as const;

export type MetricName = (typeof METRIC_NAMES)[number];

export type Metrics = Record<MetricName, number>;

export interface TupleGroup {
  use_cases: string[];
  count: number;
}

export interface PartitionState {
  id: number;
  classes: string[];
  use_cases: string[];
  interfaces: string[];
  tuples: TupleGroup[];
}

export interface BoardState {
  revision: number;
  corpus_digest: string;
  target_n: number;
  edit_count: number;
  metrics: Metrics;
  partitions: PartitionState[];
  per_class: Record<string, string[]>;
}

export interface MetricsDoc extends Metrics {
  partitions: Array<{
    classes: string[];
    use_cases: string[];
    interfaces: string[];
  }>;
}

export interface PartitionFile {
  partitions: Array<{ classes: string[] }>;
}
