import sys
import time

import dotenv
import pandas as pd
from loguru import logger

from fuzzdyn import config
from fuzzdyn.dynamics import checks
from fuzzdyn.dynamics.sampling import make_rng
from fuzzdyn.gallery import examples, shift

dotenv.load_dotenv()


class AcceptanceBenchmark:
    def __init__(self, seed=None, trials=1000, oracle_trials=200):
        self.seed = config["defaults"]["seed"] if seed is None else seed
        self.trials = trials
        self.oracle_trials = oracle_trials
        self.rows = []

    def _suites(self):
        yield "metric identities", lambda: checks.metric_identity_suite(make_rng(self.seed), self.trials)
        yield "level bounds", lambda: checks.level_bound_suite(make_rng(self.seed), self.trials)
        yield "transfer formulas", lambda: examples.transfer_suite(make_rng(self.seed), self.oracle_trials)
        yield "skorokhod oracle", lambda: checks.skorokhod_oracle_suite(make_rng(self.seed), self.oracle_trials)
        yield "example 1", lambda: examples.verify_example1(seed=self.seed)
        yield "example 2", lambda: examples.verify_example2(seed=self.seed)
        yield "example 3", lambda: examples.verify_example3(seed=self.seed)
        yield "sensitivity extraction", lambda: checks.extraction_suite(make_rng(self.seed), self.trials)
        yield "shift demo", lambda: shift.shift_demo(seed=self.seed)

    def apply(self) -> pd.DataFrame:
        for name, suite in self._suites():
            start = time.perf_counter()
            report = suite()
            elapsed = time.perf_counter() - start
            failures = len(report.violations) if hasattr(report, "violations") else len(report.failed)
            logger.info(f"{name}: passed={report.passed} in {elapsed:.2f}s")
            self.rows.append({"suite": name, "passed": report.passed, "failures": failures,
                              "seconds": round(elapsed, 2)})
        return pd.DataFrame(self.rows)


if __name__ == '__main__':
    summary = AcceptanceBenchmark().apply()
    print(summary.to_string(index=False))
    sys.exit(0 if summary["passed"].all() else 1)
