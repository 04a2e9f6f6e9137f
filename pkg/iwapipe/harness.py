"""
Defines the harness class, which does the following:
    * loads and validates a scenario file
    * runs its checks (possibly in parallel)
    * writes the report and the exit code
"""

import logging
import os
import pathlib
from dataclasses import dataclass, field
from multiprocessing import Pool
from time import sleep, perf_counter

import numpy as np
import galois
from tqdm import tqdm

import iwapipe
from iwapipe import config, display, fileio
from iwapipe.checks import CHECKS, validate_needs
from iwapipe.errors import ConfigError
from iwapipe.execution import deferred_check, execute_check
from iwapipe.padic_core import PrimeConfig
from iwapipe.utility import FAIL, PASS, combine_status, jsonable

SCENARIO_KEYS = {'name', 'config', 'checks', 'cutoff', 'samples', 'inputs', 'params'}
CHECK_KEYS = {'check', 'id', 'params', 'cutoff', 'samples', 'config'}

@dataclass
class CheckEntry:
    check_id: str
    name: str
    cfg: PrimeConfig
    cutoff: int | None
    samples: int
    params: dict

@dataclass
class Scenario:
    """a validated scenario file

    Arguments:
        name        report and log file stem
        cfg         PrimeConfig shared by all checks (individual checks may override keys)
        entries     CheckEntry per requested check
        inputs      parsed input documents by name
        raw         the scenario document as loaded (echoed in the report)
    """
    name: str
    cfg: PrimeConfig
    entries: list
    inputs: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, filepath):
        filepath = pathlib.Path(filepath)
        try:
            data = fileio.read_json(filepath)
        except FileNotFoundError:
            raise ConfigError('scenario file not found', str(filepath))
        except ValueError as err:
            raise ConfigError(f'not valid JSON ({err})', str(filepath))
        return cls.from_dict(data, filepath.parent)

    @classmethod
    def from_dict(cls, data, directory='.'):
        if not isinstance(data, dict):
            raise ConfigError('a scenario must be a JSON object', 'scenario')
        unknown = set(data) - SCENARIO_KEYS
        if unknown:
            raise ConfigError(f'unknown keys {sorted(unknown)}', 'scenario')

        name = data.get('name')
        if not isinstance(name, str) or not name:
            raise ConfigError('expected a non-empty string', 'name')
        cfg = _prime_config(data.get('config'), 'config')
        cutoff = _cutoff(data.get('cutoff'), cfg, 'cutoff')
        samples = _samples(data.get('samples', 100), 'samples')
        inputs = _inputs(data.get('inputs', {}), pathlib.Path(directory))
        params = data.get('params', {})
        if not isinstance(params, dict):
            raise ConfigError('expected an object', 'params')

        checks = data.get('checks')
        if not isinstance(checks, list) or not checks:
            raise ConfigError('expected a non-empty list of checks', 'checks')

        entries = []
        for n, item in enumerate(checks):
            location = f'checks[{n}]'
            if isinstance(item, str):
                item = dict(check=item)
            if not isinstance(item, dict) or 'check' not in item:
                raise ConfigError('expected a check name or an object with a "check" key', location)
            unknown = set(item) - CHECK_KEYS
            if unknown:
                raise ConfigError(f'unknown keys {sorted(unknown)}', location)
            check_name = item['check']
            if check_name not in CHECKS:
                raise ConfigError(f"unknown check '{check_name}'", location)

            entry_cfg = cfg
            if 'config' in item:
                entry_cfg = _prime_config({**cfg.to_dict(), **item['config']}, f'{location}.config')
            entry_cutoff = _cutoff(item.get('cutoff', cutoff), entry_cfg, f'{location}.cutoff')
            validate_needs(check_name, entry_cfg, entry_cutoff, location)

            entry_params = {**params, **item.get('params', {})}
            module = entry_params.get('module')
            if isinstance(module, str) and module not in ('trivial', 'regular', 'quotient') and module not in inputs:
                raise ConfigError(f"module '{module}' is neither a preset nor an input", f'{location}.params.module')

            entries.append(CheckEntry(check_id=item.get('id', check_name), name=check_name, cfg=entry_cfg,
                                      cutoff=entry_cutoff, samples=_samples(item.get('samples', samples), location),
                                      params=entry_params))

        ids = [entry.check_id for entry in entries]
        duplicates = sorted({x for x in ids if ids.count(x) > 1})
        if duplicates:
            raise ConfigError(f'duplicate check ids {duplicates}', 'checks')

        return cls(name=name, cfg=cfg, entries=entries, inputs=inputs, raw=data)

def _prime_config(data, location):
    if not isinstance(data, dict):
        raise ConfigError('expected an object with p, f, M', location)
    try:
        return PrimeConfig.from_dict(data)
    except ConfigError as err:
        raise ConfigError(str(err), location) from None

def _cutoff(cutoff, cfg, location):
    if cutoff is None:
        return None
    if not isinstance(cutoff, int) or isinstance(cutoff, bool) or cutoff < 0:
        raise ConfigError(f'expected a non-negative integer, got {cutoff!r}', location)
    if cutoff >= cfg.p**cfg.M:
        raise ConfigError(f'cutoff {cutoff} is not below p^M = {cfg.p**cfg.M}', location)
    return cutoff

def _samples(samples, location):
    if not isinstance(samples, int) or isinstance(samples, bool) or samples < 1:
        raise ConfigError(f'expected a positive sample count, got {samples!r}', location)
    return samples

def _inputs(inputs, directory):
    if not isinstance(inputs, dict):
        raise ConfigError('expected an object of name: path', 'inputs')
    parsed = {}
    for name, path in inputs.items():
        filepath = pathlib.Path(path)
        if not filepath.is_absolute():
            filepath = directory / filepath
        if not filepath.is_file():
            raise ConfigError(f'file {filepath} does not exist', f'inputs.{name}')
        try:
            parsed[name] = fileio.read_json(filepath)
        except ValueError as err:
            raise ConfigError(f'file {filepath} is not valid JSON ({err})', f'inputs.{name}')
    return parsed

def versions():
    return dict(iwapipe=iwapipe.__version__, numpy=np.__version__, galois=galois.__version__)

class harness:
    """Run the checks of a scenario and report on them"""

    def __init__(self, scenario, out=None, csv=None, processes=None, timings=False):
        self.scenario = scenario
        if out is None:
            out = config.get_output_dir() / f'{scenario.name}.report.json'
        self.out = pathlib.Path(out)
        self.csv = csv
        self.timings = timings

        settings = config.get_config()
        if processes is None:
            processes = settings['execution']['processes'] or os.cpu_count()
            if not settings['execution']['parallel_default']:
                processes = 1
        self.processes = max(1, min(processes, len(scenario.entries)))
        self.progress = settings['progress']

        self.results = dict()
        self.elapsed = dict()

    def jobs(self):
        return [deferred_check(e.check_id, e.name, e.cfg, e.cutoff, e.samples, e.params, self.scenario.inputs)
                for e in self.scenario.entries]

    def run(self):
        """Run every check, write the report and return the exit code"""
        self._init_logging()
        jobs = self.jobs()
        logging.info(f"scenario '{self.scenario.name}': {len(jobs)} checks on {self.processes} processes")
        display.running_checks_message(self.scenario.name, len(jobs))

        bar = tqdm(total=len(jobs), disable=self.progress['disable'], mininterval=self.progress['mininterval'],
                   leave=False)
        t_start = perf_counter()
        if self.processes == 1:
            for job in jobs:
                bar.set_description(job.check_id)
                self._collect(job.check_id, execute_check(job))
                bar.update()
        else:
            with Pool(processes=self.processes) as pool:
                results = {job.check_id: pool.apply_async(execute_check, (job,)) for job in jobs}
                while results:
                    to_delete = []
                    for check_id, result in results.items():
                        if result.ready():
                            try:
                                self._collect(check_id, result.get())
                            except Exception as err:
                                logging.error(err)
                                self._collect(check_id, (dict(status=FAIL, witness=f'{type(err).__name__}: {err}'), None, 0.0))
                            to_delete.append(check_id)
                            bar.update()

                    for check_id in to_delete:
                        results.pop(check_id)

                    sleep(.05)

                pool.close()
                pool.join()
        bar.close()
        logging.info(f'finished in {perf_counter() - t_start:.2f}s')

        report = self.report()
        fileio.write_json(self.out, report)
        if self.csv is not None:
            fileio.write_csv(self.csv, self.summary_rows(report), ['id', 'check', 'status', 'witness'])

        for entry in report['checks']:
            display.check_line(entry['id'], entry['status'], self.elapsed[entry['id']] if self.timings else None)
        failures = sum(entry['status'] != PASS for entry in report['checks'])
        display.check_summary(len(report['checks']), failures, self.out)
        return 0 if report['status'] == PASS else 1

    def _collect(self, check_id, outcome):
        result, tb, elapsed = outcome
        if tb is not None:
            logging.error(tb)
        logging.info(f"{check_id}: {result['status']} ({elapsed:.2f}s)")
        self.results[check_id] = result
        self.elapsed[check_id] = elapsed

    def report(self):
        """the JSON report: identical bytes for identical (scenario, seed, versions)"""
        names = {e.check_id: e.name for e in self.scenario.entries}
        checks = [dict(id=check_id, check=names[check_id], **self.results[check_id])
                  for check_id in sorted(self.results)]
        report = dict(scenario=jsonable(self.scenario.raw), seed=self.scenario.cfg.seed, versions=versions(),
                      status=combine_status(*(c['status'] for c in checks)), checks=checks)
        if self.timings:
            report['timings'] = {check_id: round(self.elapsed[check_id], 3) for check_id in sorted(self.elapsed)}
        return report

    @staticmethod
    def summary_rows(report):
        rows = []
        for entry in report['checks']:
            witness = entry.get('witness')
            rows.append(dict(id=entry['id'], check=entry['check'], status=entry['status'],
                             witness='' if witness is None else fileio.dumps(witness).replace('\n', ' ')))
        return rows

    def _init_logging(self):
        self.out.parent.mkdir(parents=True, exist_ok=True)
        self.logfile = self.out.parent / f'{self.scenario.name}.log'
        for handler in logging.root.handlers[:]:
            logging.root.removeHandler(handler)
        logging.basicConfig(filename=self.logfile, filemode='w', level=logging.INFO,
                            format='%(levelname)s: %(message)s')
        logging.captureWarnings(True)
