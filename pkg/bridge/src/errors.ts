/** The solver executable could not be found at any searched location. */
export class SolverNotFoundError extends Error {
  constructor(public readonly searched: string[]) {
    super(
      `genopt executable not found; searched: ${searched.join(', ')}. ` +
      'Install the solver package (pip install genopt) or point GENOPT_BIN ' +
      'at the executable.',
    );
    this.name = 'SolverNotFoundError';
  }
}

/** The solver ran but exited with a nonzero status. */
export class SolverExecutionError extends Error {
  constructor(
    public readonly exitCode: number,
    public readonly stderr: string,
  ) {
    super(`genopt exited with status ${exitCode}: ${stderr.trim()}`);
    this.name = 'SolverExecutionError';
  }
}

/** The solver produced output that does not parse as a result document. */
export class ProtocolError extends Error {
  constructor(message: string, public readonly raw: string) {
    super(`${message}; raw output attached`);
    this.name = 'ProtocolError';
  }
}
