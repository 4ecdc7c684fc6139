from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import Any, Callable

from rich import box
from rich.console import Console
from rich.table import Table

from .algebra.cores import core_of
from .algebra.cyclic import loop_lemma_harness
from .algebra.polymorphisms import find_linked_wnu_pair, has_ts_all_arities
from .algebra.structures import FiniteStructure
from .atlas.core import PatternAtlas
from .atlas.io import export_atlas
from .atlas.orbit import orbit_structure
from .atlas.registry import resolve_atlas
from .config import ConfigError, RunConfig
from .engine.generate import gen_random_instance
from .engine.instance import Instance, is_trivial
from .engine.minimality import check_levels, establish_minimality, is_minimal
from .engine.search import SearchStats, search_solution
from .formats import (
    certificate_to_dict,
    finite_instance_from_dict,
    finite_instance_to_dict,
    load_certificate,
    load_instance,
    load_structure,
    load_witness,
    save_instance,
    save_verdict,
    thaw,
    witness_to_dict,
)
from .logging_config import get_logger
from .mmsnp.colors import datalog_rewritable
from .mmsnp.fpp import fpp_solve
from .mmsnp.obstructions import ObstructionSet, parse_obstruction_set
from .reduction.lifting import verify_witness
from .reduction.orbit import build_orbit_instance
from .reduction.pipeline import SolveResult, Verdict, resolve_levels, solve
from .repro import run_acceptance, write_report
from .utils import FormatError, load_document, save_document

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CAPABILITY = 2
EXIT_FORMAT = 3
EXIT_UNSAT = 10
EXIT_UNKNOWN = 11

VERDICT_EXIT = {Verdict.SAT: EXIT_OK, Verdict.UNSAT: EXIT_UNSAT, Verdict.UNKNOWN: EXIT_UNKNOWN}


class CLIHandler:
    """Dispatch one configured run to the matching subcommand."""

    def __init__(self, console: Console | None = None) -> None:
        self.console = console or Console()
        self.handlers: dict[str, Callable[[RunConfig], int]] = {
            "export-atlas": self._export_atlas,
            "minimize": self._minimize,
            "check-minimal": self._check_minimal,
            "solve-finite": self._solve_finite,
            "reduce": self._reduce,
            "solve": self._solve,
            "verify-witness": self._verify_witness,
            "analyze-structure": self._analyze_structure,
            "analyze-mmsnp": self._analyze_mmsnp,
            "fpp-solve": self._fpp_solve,
            "loop-harness": self._loop_harness,
            "gen": self._gen,
            "repro": self._repro,
        }
        logger.debug("CLIHandler initialized")

    def run(self, config: RunConfig) -> int:
        """Run the configured subcommand.

        Returns:
            The exit code of the subcommand.
        """
        logger.info("Running %s", config.command)
        return self.handlers[config.command](config)

    # ------------------------------------------------------------------
    # Inputs
    # ------------------------------------------------------------------

    @staticmethod
    def _require(config: RunConfig, *names: str) -> None:
        missing = [f"--{name.replace('_', '-')}" for name in names if getattr(config, name) is None]
        if missing:
            raise ConfigError(f"{config.command} needs {', '.join(missing)}")

    def _atlas(self, config: RunConfig) -> PatternAtlas:
        self._require(config, "atlas")
        atlas = resolve_atlas(config.atlas)  # type: ignore[arg-type]
        self.console.print(f"🧭 Atlas: {atlas.name} (k={atlas.k}, ell={atlas.ell})")
        return atlas

    def _instance(self, config: RunConfig) -> Instance:
        atlas = self._atlas(config)
        self._require(config, "instance")
        instance = load_instance(config.instance, atlas)  # type: ignore[arg-type]
        self.console.print(f"📄 Loaded: {config.instance}")
        return instance

    def _levels(self, config: RunConfig, atlas: PatternAtlas) -> tuple[int, int]:
        levels = resolve_levels(atlas, config.mode, config.levels)
        check_levels(atlas, *levels, unsafe=config.unsafe)
        return levels

    def _obstructions(self, config: RunConfig) -> ObstructionSet:
        self._require(config, "obstructions")
        path = Path(config.obstructions)  # type: ignore[arg-type]
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise FormatError(f"Error reading obstruction set {path}: {e}") from e
        obstructions = parse_obstruction_set(text)
        if config.assert_normal_form and not obstructions.normal_form:
            obstructions = dataclasses.replace(obstructions, normal_form=True)
        self.console.print(
            f"🎨 Obstruction set: {len(obstructions.members)} members, "
            f"colors {', '.join(obstructions.colors)}"
        )
        return obstructions

    def _write(self, document: dict[str, Any], output: str | None, what: str) -> None:
        if output is None:
            return
        path = save_document(document, output)
        self.console.print(f"💾 {what} written to {path}")

    def _verdict_line(self, verdict: Verdict) -> None:
        style = {"SAT": "green", "UNSAT": "red", "UNKNOWN": "yellow"}[verdict.value]
        icon = {"SAT": "✅", "UNSAT": "❌", "UNKNOWN": "❓"}[verdict.value]
        self.console.print(f"{icon} [{style}]{verdict.value}[/{style}]")

    # ------------------------------------------------------------------
    # Atlases and minimality
    # ------------------------------------------------------------------

    def _export_atlas(self, config: RunConfig) -> int:
        atlas = self._atlas(config)
        self._require(config, "output")
        path = export_atlas(atlas, config.output)  # type: ignore[arg-type]
        self.console.print(f"💾 Atlas written to {path}")
        return EXIT_OK

    def _minimize(self, config: RunConfig) -> int:
        instance = self._instance(config)
        k2, l2 = self._levels(config, instance.atlas)
        minimized = establish_minimality(
            instance, k2, l2, unsafe=config.unsafe, pattern_cap=config.pattern_cap
        )
        if config.output:
            save_instance(minimized, config.output)
            self.console.print(f"💾 Minimal instance written to {config.output}")
        if is_trivial(minimized):
            self.console.print(f"❌ [red]Trivial after ({k2},{l2})-minimization[/red]")
            return EXIT_UNSAT
        self.console.print(
            f"✅ [green]({k2},{l2})-minimal with {len(minimized.constraints)} constraints[/green]"
        )
        return EXIT_OK

    def _check_minimal(self, config: RunConfig) -> int:
        instance = self._instance(config)
        k2, l2 = self._levels(config, instance.atlas)
        check = is_minimal(instance, k2, l2)
        if check:
            self.console.print(f"✅ [green]Instance is ({k2},{l2})-minimal[/green]")
            return EXIT_OK
        self.console.print(f"❌ [red]Not ({k2},{l2})-minimal: {check.reason}[/red]")
        return EXIT_FAILURE

    def _solve_finite(self, config: RunConfig) -> int:
        self._require(config, "instance")
        path = str(config.instance)
        fi = finite_instance_from_dict(load_document(path, "finite-instance"), path)
        stats = SearchStats()
        assignment = search_solution(fi, node_cap=config.node_cap, stats=stats)
        verdict = Verdict.UNSAT if assignment is None else Verdict.SAT
        self._verdict_line(verdict)
        self.console.print(f"[dim]{stats.nodes} nodes, {stats.revisions} revisions[/dim]")
        if config.output:
            body = {
                "verdict": verdict.value,
                "assignment": (
                    None
                    if assignment is None
                    else [[thaw(v), thaw(a)] for v, a in assignment.items()]
                ),
                "stats": stats.to_dict(),
            }
            save_verdict("solve-finite", body, config.output)
            self.console.print(f"💾 Verdict written to {config.output}")
        return VERDICT_EXIT[verdict]

    def _reduce(self, config: RunConfig) -> int:
        instance = self._instance(config)
        k2, l2 = self._levels(config, instance.atlas)
        minimized = establish_minimality(instance, k2, l2, unsafe=config.unsafe)
        if is_trivial(minimized):
            self.console.print(f"❌ [red]Trivial after ({k2},{l2})-minimization[/red]")
            return EXIT_UNSAT
        orbit = build_orbit_instance(minimized)
        table = Table(title="🔁 Orbit instance", box=box.ROUNDED, title_style="bold cyan")
        table.add_column("Measure", style="bold")
        table.add_column("Value", justify="right")
        for key, value in orbit.summary().items():
            table.add_row(key, str(value))
        self.console.print(table)
        self._write(finite_instance_to_dict(orbit.finite), config.output, "Orbit instance")
        return EXIT_OK

    # ------------------------------------------------------------------
    # Solving
    # ------------------------------------------------------------------

    def _certificate(self, config: RunConfig, atlas: PatternAtlas) -> str | None:
        if not config.certify:
            return None
        structure = orbit_structure(atlas).with_singletons()
        pair = find_linked_wnu_pair(structure, cap=config.closure_cap)
        if pair is None:
            self.console.print("[yellow]⚠️ No linked WNU pair on the orbit structure[/yellow]")
            return None
        self.console.print(f"🔏 Certificate: linked WNU pair on {atlas.name}")
        return f"linked-wnu-pair:{atlas.name}"

    def _solve(self, config: RunConfig) -> int:
        instance = self._instance(config)
        if config.levels is not None:
            check_levels(instance.atlas, *config.levels, unsafe=config.unsafe)
        certificate = self._certificate(config, instance.atlas)
        result = solve(
            instance,
            config.mode,
            levels=config.levels,
            certificate=certificate,
            unsafe=config.unsafe,
            node_cap=config.node_cap,
        )
        self._print_solve(result)
        if result.witness is not None:
            check = verify_witness(instance, result.witness)
            if not check.ok:
                self.console.print(f"❌ [red]Witness rejected: {check.problems[0]}[/red]")
                return EXIT_FAILURE
            if config.emit_witness:
                save_document(witness_to_dict(result.witness), config.emit_witness)
                self.console.print(f"💾 Witness written to {config.emit_witness}")
        if config.output:
            save_verdict("solve", result.to_dict(), config.output)
            self.console.print(f"💾 Verdict written to {config.output}")
        return VERDICT_EXIT[result.verdict]

    def _print_solve(self, result: SolveResult) -> None:
        self._verdict_line(result.verdict)
        table = Table(box=box.SIMPLE, show_header=False)
        table.add_column("Field", style="bold")
        table.add_column("Value")
        table.add_row("mode", result.mode)
        table.add_row("levels", str(result.levels))
        if result.certificate:
            table.add_row("certificate", result.certificate)
        if result.orbit is not None:
            summary = result.orbit.summary()
            table.add_row(
                "orbit", f"{summary['variables']} variables, {summary['constraints']} constraints"
            )
        if result.witness is not None:
            table.add_row("witness", f"{result.witness.size} classes")
            if result.witness.materialization:
                table.add_row("concrete", str(result.witness.materialization))
        self.console.print(table)

    def _verify_witness(self, config: RunConfig) -> int:
        instance = self._instance(config)
        self._require(config, "witness")
        check = verify_witness(instance, load_witness(config.witness))  # type: ignore[arg-type]
        if check.ok:
            self.console.print("✅ [green]Witness verified[/green]")
            return EXIT_OK
        self.console.print("❌ [red]Witness rejected[/red]")
        for problem in check.problems:
            self.console.print(f"  • {problem}")
        return EXIT_FAILURE

    # ------------------------------------------------------------------
    # Finite structures
    # ------------------------------------------------------------------

    def _structure(self, path: str | None, flag: str) -> FiniteStructure:
        if path is None:
            raise ConfigError(f"missing {flag}")
        structure = load_structure(path)
        self.console.print(f"📐 Structure {structure.name or path}: {structure.size} elements")
        return structure

    def _analyze_structure(self, config: RunConfig) -> int:
        structure = self._structure(config.structure, "--structure")
        core = core_of(structure)
        table = Table(title="🧮 Structure analysis", box=box.ROUNDED, title_style="bold cyan")
        table.add_column("Analysis", style="bold")
        table.add_column("Result")
        body: dict[str, Any] = {"structure": structure.summary()}
        certificates = []
        if "core" in config.analyses:
            table.add_row("core", f"{core.core.size} of {structure.size} elements")
            body["core"] = core.to_dict()
        if "bounded-width" in config.analyses:
            pair = find_linked_wnu_pair(core.expanded, cap=config.closure_cap)
            table.add_row("bounded width", "yes (linked WNU pair)" if pair else "no")
            body["bounded_width"] = pair is not None
            if pair:
                body["linked_pair"] = {"w3": pair[0].to_dict(), "w4": pair[1].to_dict()}
                certificates.extend(pair)
        if "ts" in config.analyses:
            ts = has_ts_all_arities(core.expanded, cap=config.closure_cap)
            table.add_row("totally symmetric", "all arities" if ts else "no")
            body["ts_all_arities"] = ts is not None
            if ts is not None:
                body["ts"] = ts.to_dict()
        self.console.print(table)
        if config.output:
            save_verdict("structure", body, config.output)
            self.console.print(f"💾 Verdict written to {config.output}")
        if config.certificate:
            if not certificates:
                self.console.print("[yellow]⚠️ No certificate found to write[/yellow]")
            else:
                document = certificate_to_dict("linked-wnu-pair", core.core, certificates)
                save_document(document, config.certificate)
                self.console.print(f"💾 Certificate written to {config.certificate}")
        return EXIT_OK

    def _loop_harness(self, config: RunConfig) -> int:
        if config.certificate:
            kind, generators = load_certificate(config.certificate)
            self.console.print(f"🔏 Certificate {kind}: {len(generators)} operations")
            report = loop_lemma_harness(
                None, config.trials, config.seed, generators=generators, cap=config.closure_cap
            )
        else:
            structure = self._structure(config.structure, "--structure")
            report = loop_lemma_harness(
                structure, config.trials, config.seed, cap=config.closure_cap
            )
        table = Table(title="🔄 Loop harness", box=box.ROUNDED, title_style="bold cyan")
        for column in ("Trials", "Linked", "Loops", "Skipped", "Counterexamples"):
            table.add_column(column, justify="right")
        table.add_row(
            str(report.trials),
            str(report.linked),
            str(report.loops),
            str(report.skipped),
            str(len(report.counterexamples)),
        )
        self.console.print(table)
        if config.output:
            save_verdict("loop-harness", report.to_dict(), config.output)
        if not report.ok:
            self.console.print("❌ [red]Linked closures without loops found[/red]")
            return EXIT_FAILURE
        self.console.print("✅ [green]Every linked closure has a loop[/green]")
        return EXIT_OK

    # ------------------------------------------------------------------
    # MMSNP
    # ------------------------------------------------------------------

    def _analyze_mmsnp(self, config: RunConfig) -> int:
        obstructions = self._obstructions(config)
        verdict = datalog_rewritable(obstructions, cap=config.closure_cap)
        verdict.log_summary()
        if verdict.is_datalog:
            self.console.print("✅ [green]Datalog-rewritable (linked WNU pair found)[/green]")
        else:
            self.console.print("❌ [red]Not Datalog-rewritable[/red]")
        for step in verdict.transcript:
            self.console.print(f"  [dim]{step}[/dim]")
        if config.output:
            save_verdict("mmsnp", verdict.to_dict(), config.output)
            self.console.print(f"💾 Verdict written to {config.output}")
        return EXIT_OK

    def _fpp_solve(self, config: RunConfig) -> int:
        obstructions = self._obstructions(config)
        structure = self._structure(config.input_structure, "--input-structure")
        result = fpp_solve(
            obstructions,
            structure,
            config.mode,
            route=config.route,
            levels=config.levels,
            unsafe=config.unsafe,
        )
        self._verdict_line(result.verdict)
        if result.coloring is not None:
            table = Table(title="🎨 Coloring", box=box.SIMPLE)
            table.add_column("Vertex", style="bold")
            table.add_column("Color")
            for vertex, color in result.coloring.items():
                table.add_row(str(vertex), color)
            self.console.print(table)
        if config.output:
            save_verdict("fpp", result.to_dict(), config.output)
            self.console.print(f"💾 Verdict written to {config.output}")
        return VERDICT_EXIT[result.verdict]

    # ------------------------------------------------------------------
    # Fixtures and acceptance
    # ------------------------------------------------------------------

    def _gen(self, config: RunConfig) -> int:
        atlas = self._atlas(config)
        self._require(config, "output")
        instance = gen_random_instance(atlas, config.n_vars, config.n_constraints, config.seed)
        path = save_instance(instance, config.output)  # type: ignore[arg-type]
        self.console.print(
            f"🎲 {config.n_vars} variables, {config.n_constraints} constraints "
            f"(seed {config.seed}) written to {path}"
        )
        return EXIT_OK

    def _repro(self, config: RunConfig) -> int:
        def show(criterion: dict[str, Any]) -> None:
            icon = "✅" if criterion["ok"] else "❌"
            self.console.print(f"{icon} {criterion['id']}. {criterion['title']}")

        report = run_acceptance(config.seed, config.quick, on_criterion=show)
        table = Table(title="📋 Acceptance", box=box.ROUNDED, title_style="bold cyan")
        table.add_column("#", justify="right")
        table.add_column("Criterion")
        table.add_column("Status")
        for criterion in report["criteria"]:
            status = "[green]PASS[/green]" if criterion["ok"] else "[red]FAIL[/red]"
            table.add_row(str(criterion["id"]), criterion["title"], status)
        self.console.print(table)
        if config.output:
            json_path, markdown_path = write_report(report, config.output)
            self.console.print(f"💾 Report written to {json_path} and {markdown_path}")
        return EXIT_OK if report["ok"] else EXIT_FAILURE
