import os
import sys
from itertools import combinations
from typing import Optional

import dotenv
import fire
import loguru
import yaml

from fuzzdyn import config as package_config
from fuzzdyn.dynamics import checks
from fuzzdyn.dynamics.chaos import (ClassifierConfig, Level, default_grid, distance_trace, embedding_consistency,
                                    parse_grid, singleton_pair, transfer_check, verdict_matrix)
from fuzzdyn.dynamics.fuzzy import characteristic
from fuzzdyn.dynamics.hyper import CompactSet
from fuzzdyn.dynamics.metrics import FuzzyMetric
from fuzzdyn.dynamics.proxsens import (BasisPerturbation, PointScan, proximal_coverage, sensitivity_search,
                                       strong_sensitivity_window)
from fuzzdyn.dynamics.sampling import make_rng
from fuzzdyn.dynamics.spaces import parse_number, point_label
from fuzzdyn.errors import ConfigurationError, FuzzDynError
from fuzzdyn.gallery import examples, shift
from fuzzdyn.gallery.examples import structural_checkpoints
from fuzzdyn.io import decode_point, write_csv, write_json

dotenv.load_dotenv()
logger = loguru.logger

SEED_VARIABLE = "FUZZDYN_SEED"


class ClaimsFailed(Exception):
    """Some asserted claim of a report did not hold."""

    def __init__(self, report: str, failed: list):
        self.report = report
        self.failed = list(failed)
        super().__init__(f"{report}: failed claim(s) {', '.join(self.failed)}")


def set_verbosity(verbose: bool) -> None:
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else "INFO")


def resolve_seed(seed: Optional[int]) -> int:
    """--seed flag, then FUZZDYN_SEED, then the package default."""
    if seed is not None:
        return int(seed)
    env = os.getenv(SEED_VARIABLE)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigurationError(f"{SEED_VARIABLE} must be an integer, got {env!r}")
    return int(package_config["defaults"]["seed"])


def load_options(path: Optional[str], flags: dict) -> dict:
    """
    Flags overridden key by key by an experiment config file.
    :param path: YAML file or None
    :param flags: the command's own flags
    :return: merged options
    """
    options = dict(flags)
    if not path:
        return options
    try:
        with open(path) as f:
            data = yaml.load(f, Loader=yaml.FullLoader) or {}
    except OSError as e:
        raise ConfigurationError(f"Cannot read config file {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigurationError(f"Config file {path} must hold a mapping")
    unknown = sorted(set(data) - set(flags))
    if unknown:
        raise ConfigurationError(f"Unknown config key(s) {unknown}; expected some of {sorted(flags)}")
    options.update(data)
    return options


def _require_pass(name: str, failed: list) -> None:
    if failed:
        for claim in failed:
            logger.error(f"{name}: claim {claim} failed")
        raise ClaimsFailed(name, failed)


def _system(name):
    """(universe, system) for an example id or 'shift'."""
    if str(name) == "shift":
        universe = shift.shift_universe()
        return universe, shift.shift_map(package_config["shift"]["weight"], universe)
    return examples.build_example(int(name))


def _as_point(value, default: str, kind):
    # fire turns "3,1" into a tuple
    if value is None:
        value = default
    if isinstance(value, (tuple, list)):
        value = ",".join(str(v) for v in value)
    return decode_point(str(value), kind)


def _lift(level: Level, universe, a, b):
    if level is Level.BASE:
        return a, b
    K, L = CompactSet(universe, frozenset([a])), CompactSet(universe, frozenset([b]))
    if level is Level.HYPER:
        return K, L
    return characteristic(K), characteristic(L)


def _write_report(report, out: str, stem: str, seed: Optional[int]) -> None:
    write_json(report.to_dict(), os.path.join(out, f"{stem}.json"), seed)
    for name, trace in sorted(getattr(report, "traces", {}).items()):
        write_csv(trace.to_frame(), os.path.join(out, f"{stem}-{name.replace(':', '-')}.csv"), seed)


class Metrics:
    def check(self, trials: int = 1000, oracle_trials: int = 200, seed: Optional[int] = None,
              out: str = "results", config: Optional[str] = None, verbose: bool = False):
        """
        Run the fuzzy metric identity, level bound and Skorokhod oracle suites.
        :param trials: random instances for the identity and lemma suites
        :param oracle_trials: random pairs for the grid brute force
        :param seed: random seed
        :param out: output folder
        :param config: YAML file overriding these flags
        """
        set_verbosity(verbose)
        opts = load_options(config, {"trials": trials, "oracle_trials": oracle_trials, "seed": seed, "out": out})
        seed = resolve_seed(opts["seed"])
        rng = make_rng(seed)
        suites = [checks.metric_identity_suite(rng, int(opts["trials"])),
                  checks.level_bound_suite(rng, int(opts["trials"])),
                  checks.skorokhod_oracle_suite(rng, int(opts["oracle_trials"]))]
        write_json({s.name: s.to_dict() for s in suites}, os.path.join(opts["out"], "metrics-check.json"), seed)
        _require_pass("metrics-check", [v.check for s in suites for v in s.violations])


class Pair:
    def classify(self, level: str = "base", example=1, horizon: Optional[int] = None, metric: Optional[str] = None,
                 a: Optional[str] = None, b: Optional[str] = None, epsilon=None, deltas=None,
                 seed: Optional[int] = None, out: str = "results", config: Optional[str] = None,
                 verbose: bool = False):
        """
        Trace, distributional profile and verdict of one pair of an example system.
        :param level: base, hyper or fuzzy (singletons and characteristic functions of a and b)
        :param example: 1, 2, 3 or shift
        :param horizon: trace length; the example's configured horizon by default
        :param metric: fuzzy metric for fuzzy level pairs
        :param a: first point id, (0,0) by default
        :param b: second point id, (0,1) by default
        :param epsilon: classifier ε; the example's by default
        :param deltas: δ-grid as a list of "p/q" strings
        """
        set_verbosity(verbose)
        opts = load_options(config, {"level": level, "example": example, "horizon": horizon, "metric": metric,
                                     "a": a, "b": b, "epsilon": epsilon, "deltas": deltas, "seed": seed,
                                     "out": out})
        seed = resolve_seed(opts["seed"])
        level = Level.parse(opts["level"])
        universe, system = _system(opts["example"])
        is_example = str(opts["example"]) != "shift"
        settings = examples.example_settings(opts["example"]) if is_example else package_config["shift"]
        horizon = int(opts["horizon"] or settings["horizon"])
        default_a, default_b = ("0,0", "0,1") if is_example else ("0", "0:1")
        pa = _as_point(opts["a"], default_a, universe.kind)
        pb = _as_point(opts["b"], default_b, universe.kind)
        x, y = _lift(level, universe, pa, pb)
        metric = FuzzyMetric.parse(opts["metric"] or "sup") if level is Level.FUZZY else None
        exact = str(opts["example"]) != "2"
        trace = distance_trace(level, system, x, y, horizon, metric, exact=exact)
        overrides = {}
        if opts["epsilon"] is not None:
            overrides["epsilon"] = parse_number(opts["epsilon"])
        elif is_example:
            overrides["epsilon"] = parse_number(settings["epsilon"])
        if is_example and "d3_window" in settings:
            overrides["d3_window"] = tuple(settings["d3_window"])
        classifier = ClassifierConfig.from_config(overrides)
        grid = parse_grid(opts["deltas"]) if opts["deltas"] else default_grid()
        structural = ()
        if is_example:
            _, _, A = examples.system_from_config(opts["example"])
            structural = structural_checkpoints(A, horizon, [m for m in settings.get("checkpoints", [])
                                                             if m <= horizon])
        matrix = verdict_matrix(list(trace.pair), {(0, 1): trace}, grid, classifier, structural)
        stem = f"pair-{level.value}{'-' + metric.value if metric else ''}-{opts['example']}"
        write_csv(trace.to_frame(), os.path.join(opts["out"], f"{stem}-trace.csv"), seed)
        write_csv(matrix.profiles[(0, 1)].to_frame(), os.path.join(opts["out"], f"{stem}-profile.csv"), seed)
        write_csv(matrix.to_frame(), os.path.join(opts["out"], f"{stem}-verdicts.csv"), seed)
        write_json({"profile": matrix.profiles[(0, 1)].to_dict(), "verdict": matrix.verdicts[(0, 1)].to_dict()},
                   os.path.join(opts["out"], f"{stem}.json"), seed)
        flags = matrix.verdicts[(0, 1)].flags
        logger.info(f"{trace.name} pair {trace.pair}: " + ", ".join(f"{k}={v}" for k, v in flags.items()))

    def embed(self, example=1, a: Optional[str] = None, b: Optional[str] = None, horizon: int = 64,
              seed: Optional[int] = None, out: str = "results", config: Optional[str] = None,
              verbose: bool = False):
        """Check that base, hyper and fuzzy traces of an embedded pair coincide."""
        set_verbosity(verbose)
        opts = load_options(config, {"example": example, "a": a, "b": b, "horizon": horizon, "seed": seed,
                                     "out": out})
        seed = resolve_seed(opts["seed"])
        universe, system = _system(opts["example"])
        pa = _as_point(opts["a"], "0,0", universe.kind)
        pb = _as_point(opts["b"], "0,1", universe.kind)
        report = embedding_consistency(system, pa, pb, int(opts["horizon"]))
        write_json(report.to_dict(), os.path.join(opts["out"], f"embed-{opts['example']}.json"), seed)
        _require_pass("embed", [] if report.passed else ["embedding"])


class Example:
    def verify(self, which: int = 1, horizon: Optional[int] = None, trials: Optional[int] = None,
               samples: Optional[int] = None, seed: Optional[int] = None, out: str = "results",
               config: Optional[str] = None, verbose: bool = False):
        """
        Check the claims of example 1, 2 or 3.
        :param which: example id
        :param horizon: trace length; the configured one by default
        :param trials: random pairs of the example 3 isometry check
        :param samples: random pairs of the example 1 and 2 sampled checks
        """
        set_verbosity(verbose)
        opts = load_options(config, {"which": which, "horizon": horizon, "trials": trials, "samples": samples,
                                     "seed": seed, "out": out})
        seed = resolve_seed(opts["seed"])
        which = int(opts["which"])
        if which == 1:
            report = examples.verify_example1(opts["horizon"], seed=seed, samples=opts["samples"])
        elif which == 2:
            report = examples.verify_example2(opts["horizon"], seed=seed, samples=opts["samples"])
        elif which == 3:
            report = examples.verify_example3(opts["horizon"], opts["trials"], seed=seed)
        else:
            raise ConfigurationError(f"Unknown example {which}; choose 1, 2 or 3")
        _write_report(report, opts["out"], f"example-{which}", seed)
        _require_pass(report.name, report.failed)

    def exhaustive(self, window: Optional[int] = None, horizon: Optional[int] = None,
                   out: str = "results", config: Optional[str] = None, verbose: bool = False):
        """Example 1 claims over every compact set inside {0..window} × {0, 1}."""
        set_verbosity(verbose)
        opts = load_options(config, {"window": window, "horizon": horizon, "out": out})
        report = examples.example1_exhaustive(opts["window"], opts["horizon"])
        _write_report(report, opts["out"], "example-1-exhaustive", None)
        _require_pass(report.name, report.failed)


class Shift:
    def demo(self, weight=None, horizon: Optional[int] = None, delta=None, epsilons=None,
             samples: Optional[int] = None, seed: Optional[int] = None, out: str = "results",
             config: Optional[str] = None, verbose: bool = False):
        """
        Sensitivity, null orbits and transfer on the weighted backward shift.
        :param weight: w > 1
        :param epsilons: separations to witness
        """
        set_verbosity(verbose)
        opts = load_options(config, {"weight": weight, "horizon": horizon, "delta": delta, "epsilons": epsilons,
                                     "samples": samples, "seed": seed, "out": out})
        seed = resolve_seed(opts["seed"])
        report = shift.shift_demo(opts["weight"], opts["horizon"], opts["delta"], opts["epsilons"], seed,
                                  opts["samples"])
        _write_report(report, opts["out"], "shift-demo", seed)
        _require_pass(report.name, report.failed)

    def contraction(self, weight=None, horizon: Optional[int] = None, out: str = "results",
                    config: Optional[str] = None, verbose: bool = False):
        """Orbits of {e_probe, e_1/2} under a shift with 0 < w ≤ 1."""
        set_verbosity(verbose)
        opts = load_options(config, {"weight": weight, "horizon": horizon, "out": out})
        settings = package_config["shift"]
        weight = opts["weight"] if opts["weight"] is not None else settings["contrast_weight"]
        universe = shift.shift_universe()
        K = CompactSet(universe, frozenset([shift.ShiftVector.basis(int(settings["probe_index"])),
                                            shift.ShiftVector.basis(1, "1/2")]))
        report = shift.shift_contraction(weight, K, int(opts["horizon"] or settings["horizon"]))
        _write_report(report, opts["out"], "shift-contraction", None)
        _require_pass(report.name, report.failed)


def _scan_cells(width: int, heights=(0, 1)) -> list:
    return [(n, h) for n in range(width) for h in heights]


class Prox:
    def sample(self, system="shift", level: str = "base", epsilon="1/2", horizon: int = 16, pairs: int = 10,
               metric: Optional[str] = None, seed: Optional[int] = None, out: str = "results",
               config: Optional[str] = None, verbose: bool = False):
        """
        Fraction of sampled pairs with a proximal pair within ε.
        :param system: 1, 2, 3 or shift
        :param pairs: number of mesh pairs
        """
        set_verbosity(verbose)
        opts = load_options(config, {"system": system, "level": level, "epsilon": epsilon, "horizon": horizon,
                                     "pairs": pairs, "metric": metric, "seed": seed, "out": out})
        seed = resolve_seed(opts["seed"])
        rng = make_rng(seed)
        level = Level.parse(opts["level"])
        universe, system_map = _system(opts["system"])
        if str(opts["system"]) == "shift":
            points = [shift.random_vector(rng, 4) for _ in range(2 * int(opts["pairs"]))]
            generator = BasisPerturbation(shift.ShiftVector.basis, 6)
        else:
            cells = _scan_cells(4)
            picks = rng.integers(0, len(cells), size=2 * int(opts["pairs"]))
            points = [cells[int(i)] for i in picks]
            generator = PointScan(cells)
        mesh = [_lift(level, universe, a, b) for a, b in zip(points[::2], points[1::2]) if a != b]
        metric = FuzzyMetric.parse(opts["metric"] or "sup") if level is Level.FUZZY else None
        report = proximal_coverage(level, system_map, mesh, opts["epsilon"], int(opts["horizon"]), generator,
                                   metric=metric)
        write_json(report.to_dict(), os.path.join(opts["out"], f"prox-{opts['system']}-{level.value}.json"), seed)

    def lift(self, trials: int = 200, seed: Optional[int] = None, out: str = "results",
             config: Optional[str] = None, verbose: bool = False):
        """Proximal tuples of compact sets lift to their step fuzzy sets."""
        set_verbosity(verbose)
        opts = load_options(config, {"trials": trials, "seed": seed, "out": out})
        seed = resolve_seed(opts["seed"])
        report = checks.lift_suite(make_rng(seed), int(opts["trials"]))
        write_json(report.to_dict(), os.path.join(opts["out"], "prox-lift.json"), seed)
        _require_pass(report.name, [v.check for v in report.violations])


class Sens:
    def search(self, system="shift", level: str = "base", metric: Optional[str] = None, delta=None,
               epsilon="1", horizon: Optional[int] = None, seed: Optional[int] = None, out: str = "results",
               config: Optional[str] = None, verbose: bool = False):
        """
        First candidate near the origin whose orbit separates by more than ε.
        :param system: 1, 2, 3 or shift
        """
        set_verbosity(verbose)
        opts = load_options(config, {"system": system, "level": level, "metric": metric, "delta": delta,
                                     "epsilon": epsilon, "horizon": horizon, "seed": seed, "out": out})
        seed = resolve_seed(opts["seed"])
        level = Level.parse(opts["level"])
        universe, system_map = _system(opts["system"])
        delta = opts["delta"] if opts["delta"] is not None else package_config["shift"]["delta"]
        horizon = int(opts["horizon"] or package_config["shift"]["horizon"])
        if str(opts["system"]) == "shift":
            origin = universe.zero
            generator = BasisPerturbation(shift.ShiftVector.basis, horizon + 1)
        else:
            origin = (0, 0)
            generator = PointScan(_scan_cells(4))
        center = _lift(level, universe, origin, origin)[0]
        metric = FuzzyMetric.parse(opts["metric"] or "sup") if level is Level.FUZZY else None
        witness = sensitivity_search(level, system_map, center, delta, opts["epsilon"], horizon, generator, metric)
        write_json(witness.to_dict() if witness else {"found": False},
                   os.path.join(opts["out"], f"sens-{opts['system']}-{level.value}.json"), seed)
        _require_pass("sens-search", [] if witness else ["witness"])

    def window(self, n_from: int = 5, n_to: Optional[int] = None, delta=None, epsilon="1",
               out: str = "results", config: Optional[str] = None, verbose: bool = False):
        """Strong sensitivity of the shift: a separating candidate at every time of a window."""
        set_verbosity(verbose)
        opts = load_options(config, {"n_from": n_from, "n_to": n_to, "delta": delta, "epsilon": epsilon,
                                     "out": out})
        universe, system_map = _system("shift")
        n_to = int(opts["n_to"] or package_config["shift"]["horizon"])
        delta = opts["delta"] if opts["delta"] is not None else package_config["shift"]["delta"]
        report = strong_sensitivity_window(Level.BASE, system_map, universe.zero, delta, opts["epsilon"],
                                           int(opts["n_from"]), n_to,
                                           BasisPerturbation(shift.ShiftVector.basis, n_to + 1))
        write_json(report.to_dict(), os.path.join(opts["out"], "sens-window.json"), None)
        _require_pass("sens-window", [] if report.coverage == 1 else ["coverage"])

    def extract(self, trials: int = 1000, seed: Optional[int] = None, out: str = "results",
                config: Optional[str] = None, verbose: bool = False):
        """Level extraction of fuzzy sensitivity witnesses on forward-built instances."""
        set_verbosity(verbose)
        opts = load_options(config, {"trials": trials, "seed": seed, "out": out})
        seed = resolve_seed(opts["seed"])
        report = checks.extraction_suite(make_rng(seed), int(opts["trials"]))
        write_json(report.to_dict(), os.path.join(opts["out"], "sens-extract.json"), seed)
        _require_pass(report.name, [v.check for v in report.violations])


class FuzzDyn:
    def __init__(self):
        self.metrics = Metrics()
        self.pair = Pair()
        self.example = Example()
        self.shift = Shift()
        self.prox = Prox()
        self.sens = Sens()

    def transfer(self, example=1, alphas=None, horizon: Optional[int] = None, seed: Optional[int] = None,
                 out: str = "results", config: Optional[str] = None, verbose: bool = False):
        """
        Transfer formulas for every pair of levels of the u^α family over ({x}, {x, y}).
        :param example: 1, 2, 3 or shift
        :param alphas: levels in (0, 1); example 1's list by default
        :param horizon: steps checked
        """
        set_verbosity(verbose)
        opts = load_options(config, {"example": example, "alphas": alphas, "horizon": horizon, "seed": seed,
                                     "out": out})
        seed = resolve_seed(opts["seed"])
        universe, system = _system(opts["example"])
        if str(opts["example"]) == "shift":
            x, y = universe.zero, shift.ShiftVector.basis(int(package_config["shift"]["probe_index"]))
        else:
            x, y = (0, 0), (0, 1)
        K, L = singleton_pair(universe, x, y)
        levels = sorted(parse_number(a) for a in (opts["alphas"] or package_config["examples"][1]["alphas"]))
        horizon = int(opts["horizon"] or package_config["examples"][1]["constancy_horizon"])
        results = [transfer_check(system, K, L, a, b, horizon) for b, a in combinations(levels, 2)]
        write_json({"example": str(opts["example"]), "K": K.label, "L": L.label,
                    "checks": [r.to_dict() for r in results]},
                   os.path.join(opts["out"], f"transfer-{opts['example']}.json"), seed)
        _require_pass("transfer", [f"{point_label(r.alpha)}>{point_label(r.beta)}" for r in results
                                   if not r.passed])


def run(argv=None) -> int:
    """
    Run one command and map its outcome to an exit status: 0 when every
    asserted claim holds, 1 on failed claims, 2 on usage or domain errors.
    """
    try:
        fire.Fire(FuzzDyn, command=argv, name="fuzzdyn")
    except ClaimsFailed as e:
        logger.error(str(e))
        return 1
    except FuzzDynError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 2
    except fire.core.FireExit as e:
        return int(e.code or 0)
    return 0


def main():
    sys.exit(run(sys.argv[1:]))
