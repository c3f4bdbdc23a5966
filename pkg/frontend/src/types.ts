// Wire types mirroring the service API (docs/api.md). The console renders
// these fields verbatim and never recomputes any statistic client-side.

export interface CandidateRef {
  index: number;
  name: string;
}

export interface CandidateProb extends CandidateRef {
  prob: number;
}

export type Decision = "continue-sampling" | "stop-confirm" | "census-complete";

export interface EstimateView {
  n: number;
  draws: number;
  probWinner: number;
  probByCandidate: CandidateProb[];
  decision: Decision;
}

export interface PriorView {
  kind: string;
  a0: number;
  allowPartial: boolean;
  matchedFromTreeA0?: number;
}

export interface SessionView {
  id: string;
  createdAt: string;
  updatedAt: string;
  status: "in-progress" | "stopped-confirmed" | "census-complete";
  sampleSize: number;
  meta: {
    candidates: string[];
    totalBallots: number;
    reportedWinner: CandidateRef;
  };
  config: {
    prior: PriorView;
    threshold: number;
    drawsPerEstimate: number;
    tie: { mode: string; seed: number };
    seed: number;
    minSample: number | null;
  };
  history: EstimateView[];
}

export interface CreateSessionRequest {
  candidates: string[];
  totalBallots: number;
  reportedWinner: string;
  prior: { kind: string; a0?: number; allowPartial?: boolean; matchTreeA0?: number };
  threshold?: number;
  drawsPerEstimate?: number;
  seed?: number;
  minSample?: number | null;
}

export interface BallotRecord {
  ranking: string[];
  count: number;
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}
