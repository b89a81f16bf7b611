export { canonicalJson, requestHash } from './canonical.js';
export {
  ProtocolError,
  SolverExecutionError,
  SolverNotFoundError,
} from './errors.js';
export {
  resolveExecutable,
  solveCustom,
  solveKnapsack,
  solveRequest,
  solveTsp,
} from './client.js';
export type { ResultRecord, SolveOptions, SolveOutcome } from './client.js';
