"""Instance parsers for the standard benchmark formats.

All parsers raise ParseError with file/line positions on malformed or
truncated input and return InstanceData payloads.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import Lexicographic, Weighted
from .problems import InstanceData


class ParseError(ValueError):
    def __init__(self, path, message, line: int | None = None):
        location = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{location}: {message}")
        self.path = str(path)
        self.line = line


def _read_lines(path) -> list[str]:
    try:
        return Path(path).read_text().splitlines()
    except OSError as exc:
        raise ParseError(path, f"cannot read file ({exc})") from exc


class _Tokens:
    """Whitespace-tolerant numeric token stream that remembers line numbers."""

    def __init__(self, path, lines, start_line=0):
        self.path = path
        self.items: list[tuple[str, int]] = []
        for lineno in range(start_line, len(lines)):
            for token in lines[lineno].split():
                if token == "EOF":  # TSPLIB end sentinel
                    self.at = 0
                    return
                self.items.append((token, lineno + 1))
        self.at = 0

    def next_number(self, what: str) -> float:
        if self.at >= len(self.items):
            line = self.items[-1][1] if self.items else 1
            raise ParseError(self.path, f"truncated input: expected {what}", line)
        token, line = self.items[self.at]
        self.at += 1
        try:
            return float(token)
        except ValueError:
            raise ParseError(self.path, f"expected {what}, got {token!r}", line) from None

    def next_int(self, what: str) -> int:
        value = self.next_number(what)
        if value != int(value):
            raise ParseError(self.path, f"expected integer {what}, got {value}")
        return int(value)


def _tsplib_nint(x: float) -> int:
    # TSPLIB rounding convention for EUC_2D edge weights
    return int(x + 0.5)


def parse_tsplib(path) -> InstanceData:
    """TSPLIB: NODE_COORD_SECTION with EUC_2D, or EXPLICIT FULL_MATRIX /
    UPPER_ROW edge weights."""
    lines = _read_lines(path)
    dimension = None
    edge_weight_type = None
    edge_weight_format = None
    section = None
    section_line = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line == "EOF":
            continue
        key, _, value = line.partition(":")
        key = key.strip().upper()
        value = value.strip()
        if key == "DIMENSION":
            try:
                dimension = int(value)
            except ValueError:
                raise ParseError(path, f"bad DIMENSION value {value!r}", lineno) from None
        elif key == "EDGE_WEIGHT_TYPE":
            edge_weight_type = value.upper()
        elif key == "EDGE_WEIGHT_FORMAT":
            edge_weight_format = value.upper()
        elif key in ("NODE_COORD_SECTION", "EDGE_WEIGHT_SECTION"):
            section = key
            section_line = lineno
            break
    if dimension is None:
        raise ParseError(path, "missing DIMENSION header")
    if dimension < 2:
        raise ParseError(path, f"DIMENSION must be >= 2, got {dimension}")
    if section is None:
        raise ParseError(path, "missing coordinate or edge weight section")

    tokens = _Tokens(path, lines, start_line=section_line)
    if section == "NODE_COORD_SECTION":
        if edge_weight_type != "EUC_2D":
            raise ParseError(path, f"unsupported EDGE_WEIGHT_TYPE {edge_weight_type!r} "
                                   "(supported: EUC_2D, EXPLICIT)")
        coords = np.zeros((dimension, 2))
        for i in range(dimension):
            tokens.next_int(f"node id {i + 1}")
            coords[i, 0] = tokens.next_number("x coordinate")
            coords[i, 1] = tokens.next_number("y coordinate")
        dist = np.zeros((dimension, dimension))
        for i in range(dimension):
            dx = coords[i, 0] - coords[:, 0]
            dy = coords[i, 1] - coords[:, 1]
            row = np.sqrt(dx * dx + dy * dy)
            dist[i] = [_tsplib_nint(v) for v in row]
            dist[i, i] = 0
        dist = np.maximum(dist, dist.T)  # nint is symmetric; guard fp asymmetry
        return InstanceData(distance_matrix=dist, meta={"dimension": dimension,
                                                        "coords": coords})
    if edge_weight_type != "EXPLICIT":
        raise ParseError(path, f"unsupported EDGE_WEIGHT_TYPE {edge_weight_type!r} "
                               "(supported: EUC_2D, EXPLICIT)")
    dist = np.zeros((dimension, dimension))
    if edge_weight_format == "FULL_MATRIX":
        for i in range(dimension):
            for j in range(dimension):
                dist[i, j] = tokens.next_number(f"weight ({i}, {j})")
    elif edge_weight_format == "UPPER_ROW":
        for i in range(dimension):
            for j in range(i + 1, dimension):
                dist[i, j] = tokens.next_number(f"weight ({i}, {j})")
                dist[j, i] = dist[i, j]
    else:
        raise ParseError(path, f"unsupported EDGE_WEIGHT_FORMAT {edge_weight_format!r} "
                               "(supported: FULL_MATRIX, UPPER_ROW)")
    if not np.array_equal(dist, dist.T):
        raise ParseError(path, "explicit matrix is not symmetric")
    if np.any(np.diag(dist) != 0):
        raise ParseError(path, "explicit matrix has a nonzero diagonal")
    return InstanceData(distance_matrix=dist, meta={"dimension": dimension})


def parse_qaplib(path) -> InstanceData:
    """QAPLIB: n, then an n x n flow matrix and an n x n distance matrix."""
    lines = _read_lines(path)
    tokens = _Tokens(path, lines)
    n = tokens.next_int("problem size")
    if n < 2:
        raise ParseError(path, f"problem size must be >= 2, got {n}")
    flow = np.zeros((n, n))
    dist = np.zeros((n, n))
    for matrix, label in ((flow, "flow"), (dist, "distance")):
        for i in range(n):
            for j in range(n):
                matrix[i, j] = tokens.next_number(f"{label} entry ({i}, {j})")
    return InstanceData(flow_matrix=flow, distance_matrix=dist, meta={"dimension": n})


def parse_solomon(path) -> InstanceData:
    """Solomon VRPTW: vehicle count/capacity header and customer rows of
    (id, x, y, demand, ready, due, service); row 0 is the depot."""
    lines = _read_lines(path)
    vehicle_line = None
    customer_line = None
    for lineno, raw in enumerate(lines):
        upper = raw.strip().upper()
        if upper.startswith("VEHICLE"):
            vehicle_line = lineno
        elif upper.startswith("CUSTOMER"):
            customer_line = lineno
            break
    if vehicle_line is None or customer_line is None:
        raise ParseError(path, "missing VEHICLE or CUSTOMER section")
    numbers = []
    for raw in lines[vehicle_line + 1:customer_line]:
        for token in raw.split():
            try:
                numbers.append(float(token))
            except ValueError:
                continue
    if len(numbers) < 2:
        raise ParseError(path, "vehicle section needs NUMBER and CAPACITY",
                         vehicle_line + 1)
    vehicles, capacity = int(numbers[0]), float(numbers[1])

    data_line = None
    for lineno in range(customer_line + 1, len(lines)):
        first = lines[lineno].split()
        if first:
            try:
                int(first[0])
                data_line = lineno
                break
            except ValueError:
                continue
    if data_line is None:
        raise ParseError(path, "no customer rows found", customer_line + 1)
    rows = []
    tokens = _Tokens(path, lines, start_line=data_line)
    while tokens.at < len(tokens.items):
        row = [tokens.next_number("customer field") for _ in range(7)]
        rows.append(row)
    if not rows:
        raise ParseError(path, "no customer rows found")
    rows.sort(key=lambda r: r[0])
    coords = np.array([[r[1], r[2]] for r in rows])
    demands = np.array([r[3] for r in rows])
    ready = np.array([r[4] for r in rows])
    due = np.array([r[5] for r in rows])
    service = np.array([r[6] for r in rows])
    n_nodes = len(rows)
    dist = np.zeros((n_nodes, n_nodes))
    for i in range(n_nodes):
        dx = coords[i, 0] - coords[:, 0]
        dy = coords[i, 1] - coords[:, 1]
        dist[i] = np.sqrt(dx * dx + dy * dy)
        dist[i, i] = 0.0
    dist = (dist + dist.T) / 2.0
    return InstanceData(
        distance_matrix=dist,
        demands=demands[1:],  # customers only; depot demand is dropped
        capacity=capacity,
        vehicles=vehicles,
        ready_times=ready,
        due_times=due,
        service_times=service,
        meta={"customers": n_nodes - 1, "coords": coords},
    )


def parse_orlib_jsp(path) -> InstanceData:
    """OR-Library job shop: jobs/machines counts then (machine, duration)
    pairs per job; description lines before the counts are skipped."""
    lines = _read_lines(path)
    start = None
    counts = None
    for lineno, raw in enumerate(lines):
        parts = raw.split()
        if len(parts) == 2:
            try:
                counts = (int(parts[0]), int(parts[1]))
                start = lineno
                break
            except ValueError:
                continue
    if counts is None:
        raise ParseError(path, "missing jobs/machines count line")
    n_jobs, n_machines = counts
    if n_jobs < 1 or n_machines < 1:
        raise ParseError(path, f"bad problem size {n_jobs} x {n_machines}",
                         start + 1)
    tokens = _Tokens(path, lines, start_line=start + 1)
    jobs = []
    for j in range(n_jobs):
        ops = []
        for k in range(n_machines):
            machine = tokens.next_int(f"machine of job {j} op {k}")
            duration = tokens.next_int(f"duration of job {j} op {k}")
            if not (0 <= machine < n_machines):
                raise ParseError(path, f"machine {machine} outside [0, {n_machines})")
            if duration < 0:
                raise ParseError(path, f"negative duration {duration}")
            ops.append((machine, duration))
        jobs.append(ops)
    return InstanceData(jobs=jobs, meta={"jobs": n_jobs, "machines": n_machines})


# ---------------------------------------------------------------------------
# generic JSON payloads (shared with the scripting bridge)

def parse_json_instance(path_or_payload) -> tuple[str, InstanceData]:
    """JSON instance document: {"problem": name, ...payload fields...}."""
    if isinstance(path_or_payload, dict):
        payload = path_or_payload
        path = "<inline>"
    else:
        path = path_or_payload
        try:
            payload = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ParseError(path, f"cannot read file ({exc})") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(path, f"invalid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "problem" not in payload:
        raise ParseError(path, 'JSON instance needs a "problem" key')
    name = payload["problem"]
    try:
        instance = payload_to_instance(name, payload)
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(path, f"bad payload for problem {name!r}: {exc}") from exc
    return name, instance


def payload_to_instance(name: str, payload: dict) -> InstanceData:
    def arr(key):
        return np.asarray(payload[key], dtype=np.float64)

    meta = {}
    if "objectives" in payload:
        meta["objectives"] = tuple(payload["objectives"])
    if "comparison" in payload:
        comp = payload["comparison"]
        if comp.get("mode") == "weighted":
            meta["comparison"] = Weighted(tuple(float(w) for w in comp["weights"]))
        elif comp.get("mode") == "lexicographic":
            meta["comparison"] = Lexicographic(
                tuple(int(i) for i in comp["priority"]),
                tuple(float(t) for t in comp["tolerances"]))
        else:
            raise ValueError(f"unknown comparison mode {comp.get('mode')!r}")

    if name == "tsp":
        return InstanceData(distance_matrix=arr("dist"), meta=meta)
    if name in ("cvrp", "vrp_nonlinear"):
        return InstanceData(distance_matrix=arr("dist"), demands=arr("demands"),
                            capacity=float(payload["capacity"]),
                            vehicles=int(payload["vehicles"]), meta=meta)
    if name == "vrp_priority":
        return InstanceData(distance_matrix=arr("dist"), demands=arr("demands"),
                            capacity=float(payload["capacity"]),
                            vehicles=int(payload["vehicles"]),
                            priorities=arr("priorities"), meta=meta)
    if name == "vrptw":
        return InstanceData(distance_matrix=arr("dist"), demands=arr("demands"),
                            capacity=float(payload["capacity"]),
                            vehicles=int(payload["vehicles"]),
                            ready_times=arr("ready"), due_times=arr("due"),
                            service_times=arr("service"), meta=meta)
    if name == "knapsack":
        return InstanceData(weights=arr("weights"), values=arr("values"),
                            capacity=float(payload["capacity"]), meta=meta)
    if name == "qap":
        return InstanceData(flow_matrix=arr("flow"), distance_matrix=arr("dist"),
                            meta=meta)
    if name == "assignment":
        return InstanceData(cost_matrix=arr("cost"), meta=meta)
    if name == "graph_coloring":
        meta["num_vertices"] = int(payload["vertices"]) if "vertices" in payload else None
        return InstanceData(edges=[(int(u), int(v)) for u, v in payload["edges"]],
                            num_colors=int(payload["colors"]), meta=meta)
    if name == "bin_packing":
        return InstanceData(item_sizes=arr("sizes"),
                            bin_capacity=float(payload["bin_capacity"]), meta=meta)
    if name == "load_balancing":
        return InstanceData(durations=arr("durations"),
                            num_machines=int(payload["machines"]), meta=meta)
    if name in ("jsp_int", "jsp_perm"):
        jobs = [[(int(m), int(d)) for m, d in ops] for ops in payload["jobs"]]
        return InstanceData(jobs=jobs, meta=meta)
    if name == "schedule_binary":
        return InstanceData(cost_matrix=arr("cost"), requirements=arr("requirements"),
                            meta=meta)
    raise ValueError(f"unknown problem {name!r}")


def euclidean_distance_matrix(coords: np.ndarray, rounded: bool = False) -> np.ndarray:
    """Distance matrix from 2-d coordinates (TSPLIB rounding optional)."""
    coords = np.asarray(coords, dtype=np.float64)
    n = len(coords)
    dist = np.zeros((n, n))
    for i in range(n):
        dx = coords[i, 0] - coords[:, 0]
        dy = coords[i, 1] - coords[:, 1]
        row = np.sqrt(dx * dx + dy * dy)
        if rounded:
            row = np.array([_tsplib_nint(v) for v in row], dtype=np.float64)
        dist[i] = row
        dist[i, i] = 0.0
    return np.maximum(dist, dist.T) if rounded else (dist + dist.T) / 2.0
