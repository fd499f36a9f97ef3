"""The planner-coder-critic orchestration state machine.

One run is plan -> (code -> evaluate -> critique)* against a single
scenario. The critic routes each round: [Improve Tactic] loops back to the
coder with the critique as promotion text, [Change Tactic] goes back to the
planner with the updated skill history. The run terminates with status
"success" when a rollout report reaches the target win rate, "exhausted"
when the round budget runs out, or "aborted" on unrecoverable errors.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from ..dsl.ast import PolicySource
from ..dsl.compiler import CompileError, compile_policy
from ..dsl.extract import ExtractError, extract_code_block
from ..dsl.parser import ParseError, PolicyNameError, parse
from ..llm.backends import BackendError
from ..llm.gateway import Gateway, LlmCall
from ..sim.engine import BattleReport, EpisodeError, render_report_text, run_rollouts
from ..sim.units import ScenarioSpec
from .skills import SkillNode, new_history, serialize_history, update_path

MAX_TACTICS = 3
PLAN_RE_ASKS = 2
CODE_REPAIR_LIMIT = 3

CHANGE_TACTIC = "ChangeTactic"
IMPROVE_TACTIC = "ImproveTactic"

NO_RESULT_TEXT = "There are no combat results yet; this is the first round."
EMPTY_PROMOTION_TEXT = "None."


class PlanParseError(Exception):
    """The planner response had no parseable tactic sections after re-asks."""


@dataclass(frozen=True)
class Strategy:
    """An ordered skill list with descriptions and use-conditions."""

    names: tuple[str, ...]
    conditions: tuple[str, ...]
    descriptions: tuple[str, ...]

    def tactics_json(self) -> str:
        rows = []
        for name, cond, desc in zip(self.names, self.conditions, self.descriptions):
            description = f"Condition to use: {cond}\n{desc}" if cond else desc
            rows.append({"tactic_name": name, "tactic_description": description})
        return json.dumps(rows, ensure_ascii=False, indent=2)


@dataclass(frozen=True)
class Critique:
    decision: str  # CHANGE_TACTIC | IMPROVE_TACTIC
    analysis: str
    promotion: str
    decision_found: bool = True


_TACTIC_HEADER_RE = re.compile(r"^###\s*Tactic\s*\d+\s*:\s*(.+?)\s*$", re.MULTILINE)
_CONDITION_RE = re.compile(
    r"\*\*Condition to use:?\*\*:?\s*(.*?)(?=\*\*Tactic Skeleton|\Z)", re.DOTALL)
_SKELETON_RE = re.compile(r"\*\*Tactic Skeleton:?\*\*:?\s*(.*)\Z", re.DOTALL)
_DECISION_RE = re.compile(r"\[(Change Tactic|Improve Tactic)\]")


def parse_strategy(text: str) -> Strategy | None:
    """Parse "### Tactic k:" sections; None when no usable section exists."""
    headers = list(_TACTIC_HEADER_RE.finditer(text))
    if not headers:
        return None
    names, conditions, descriptions = [], [], []
    for i, m in enumerate(headers[:MAX_TACTICS]):
        name = m.group(1).strip()
        if not name:
            continue
        end = headers[i + 1].start() if i + 1 < len(headers) else len(text)
        section = text[m.end():end]
        cm = _CONDITION_RE.search(section)
        sm = _SKELETON_RE.search(section)
        names.append(name)
        conditions.append(cm.group(1).strip() if cm else "")
        descriptions.append(sm.group(1).strip() if sm else section.strip())
    if not names:
        return None
    return Strategy(tuple(names), tuple(conditions), tuple(descriptions))


def parse_critique(text: str) -> Critique:
    """Route on the bracketed decision tokens; the last occurrence wins."""
    matches = _DECISION_RE.findall(text)
    if matches:
        decision = CHANGE_TACTIC if matches[-1] == "Change Tactic" else IMPROVE_TACTIC
        return Critique(decision=decision, analysis=text, promotion=text)
    return Critique(decision=IMPROVE_TACTIC, analysis=text, promotion=text,
                    decision_found=False)


# --- spec-level operations -------------------------------------------------

def plan(gateway: Gateway, history: SkillNode, task_text: str,
         result_text: str = NO_RESULT_TEXT) -> tuple[Strategy, list[LlmCall]]:
    """Ask the planner for a strategy; re-ask up to PLAN_RE_ASKS times."""
    bindings = {
        "TASK INFORMATION": task_text,
        "RESULT": result_text,
        "HISTORY": serialize_history(history),
    }
    calls: list[LlmCall] = []
    for _attempt in range(1 + PLAN_RE_ASKS):
        call = gateway.call("planner", bindings)
        calls.append(call)
        strategy = parse_strategy(call.response)
        if strategy is not None:
            return strategy, calls
    raise PlanParseError(
        f"no '### Tactic' sections in planner response after {PLAN_RE_ASKS} re-asks")


@dataclass(frozen=True)
class CodeResult:
    source: PolicySource | None
    ast: object | None
    compiled: object | None
    calls: tuple[LlmCall, ...]
    failure: str | None  # diagnostics when the repair limit was exceeded


def code(gateway: Gateway, strategy: Strategy, promotion: str,
         task_text: str) -> CodeResult:
    """Ask the coder for a policy; feed diagnostics back on parse failures."""
    calls: list[LlmCall] = []
    current_promotion = promotion or EMPTY_PROMOTION_TEXT
    failure = None
    for _attempt in range(1 + CODE_REPAIR_LIMIT):
        bindings = {
            "TASK INFORMATION": task_text,
            "PROMOTION": current_promotion,
            "TACTICS": strategy.tactics_json(),
        }
        call = gateway.call("coder", bindings)
        calls.append(call)
        try:
            extracted = extract_code_block(call.response)
            ast = parse(extracted.source)
            compiled = compile_policy(ast)
            return CodeResult(extracted.source, ast, compiled, tuple(calls), None)
        except (ExtractError, ParseError, PolicyNameError, CompileError) as e:
            failure = f"{type(e).__name__}: {e}"
            current_promotion = (
                f"The previous response could not be used: {failure}\n"
                f"Please return one complete policy in the battle policy language, "
                f"surrounded in the ```python and ``` structure.")
    return CodeResult(None, None, None, tuple(calls), failure)


def criticize(gateway: Gateway, code_text: str, result_text: str,
              task_text: str) -> tuple[Critique, list[LlmCall]]:
    """Ask the critic to analyze a round; result_text is the report sentence
    or the error trace."""
    bindings = {
        "TASK INFORMATION": task_text,
        "CODE": code_text,
        "RESULT": result_text,
    }
    call = gateway.call("critic", bindings)
    return parse_critique(call.response), [call]


# --- the pipeline ----------------------------------------------------------

@dataclass(frozen=True)
class PipelineConfig:
    max_rounds: int = 30
    target_win_rate: float = 0.9
    episodes: int = 10
    base_seed: int = 0


@dataclass
class PhaseRecord:
    phase: str  # "plan" | "code" | "evaluate" | "critique"
    prompt_digests: list[str] = field(default_factory=list)
    response: str | None = None
    report: dict | None = None
    error: str | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "phase": self.phase,
            "prompt_digests": self.prompt_digests,
            "response": self.response,
            "report": self.report,
            "error": self.error,
            "detail": self.detail,
        }


@dataclass
class PipelineTrace:
    scenario: str
    config: PipelineConfig
    rounds: list[PhaseRecord] = field(default_factory=list)
    status: str = "exhausted"  # "success" | "exhausted" | "aborted"
    final_win_rate: float | None = None
    abort_reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "config": {
                "max_rounds": self.config.max_rounds,
                "target_win_rate": self.config.target_win_rate,
                "episodes": self.config.episodes,
                "base_seed": self.config.base_seed,
            },
            "rounds": [r.to_dict() for r in self.rounds],
            "status": self.status,
            "final_win_rate": self.final_win_rate,
            "abort_reason": self.abort_reason,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())


def run_pipeline(scenario: ScenarioSpec, gateway: Gateway,
                 config: PipelineConfig = PipelineConfig()) -> PipelineTrace:
    """Drive the full plan/code/evaluate/critique machine on one scenario."""
    trace = PipelineTrace(scenario=scenario.name, config=config)
    history = new_history()
    task_text = scenario.task_text
    strategy: Strategy | None = None
    promotion = ""
    result_text = NO_RESULT_TEXT
    need_plan = True
    last_win_rate: float | None = None

    try:
        for _round in range(config.max_rounds):
            if need_plan:
                strategy, calls = plan(gateway, history, task_text, result_text)
                trace.rounds.append(PhaseRecord(
                    phase="plan",
                    prompt_digests=[c.digest for c in calls],
                    response=calls[-1].response,
                    detail={"skills": list(strategy.names)},
                ))
                need_plan = False
                promotion = ""

            code_result = code(gateway, strategy, promotion, task_text)
            trace.rounds.append(PhaseRecord(
                phase="code",
                prompt_digests=[c.digest for c in code_result.calls],
                response=code_result.calls[-1].response,
                error=code_result.failure,
                detail={"policy_id": code_result.source.id if code_result.source else None},
            ))

            report: BattleReport | None = None
            if code_result.compiled is not None:
                try:
                    report = run_rollouts(scenario, code_result.compiled,
                                          episodes=config.episodes,
                                          base_seed=config.base_seed)
                    result_text = render_report_text(report)
                    trace.rounds.append(PhaseRecord(
                        phase="evaluate", report=report.to_dict(),
                        detail={"win_rate": report.win_rate}))
                except EpisodeError as e:
                    result_text = f"The policy failed during evaluation: {e}"
                    trace.rounds.append(PhaseRecord(phase="evaluate", error=str(e)))
            else:
                result_text = (f"The coder could not produce a working policy: "
                               f"{code_result.failure}")
                trace.rounds.append(PhaseRecord(phase="evaluate", error=result_text))

            # a bugged or unusable round backpropagates as a zero win rate
            g = report.win_rate if report is not None else 0.0
            update_path(history, strategy.names, g)

            if report is not None and report.win_rate >= config.target_win_rate:
                trace.status = "success"
                trace.final_win_rate = report.win_rate
                return trace

            code_text = code_result.source.text if code_result.source else "(no policy extracted)"
            critique, calls = criticize(gateway, code_text, result_text, task_text)
            trace.rounds.append(PhaseRecord(
                phase="critique",
                prompt_digests=[c.digest for c in calls],
                response=calls[-1].response,
                detail={"decision": critique.decision,
                        "decision_found": critique.decision_found},
            ))
            if critique.decision == CHANGE_TACTIC:
                need_plan = True
            else:
                promotion = critique.promotion
        trace.status = "exhausted"
        if trace.rounds and trace.rounds[-1].report:
            trace.final_win_rate = trace.rounds[-1].report.get("win_rate")
        return trace
    except (PlanParseError, BackendError) as e:
        trace.status = "aborted"
        trace.rounds.append(PhaseRecord(phase="plan" if isinstance(e, PlanParseError) else "code",
                                        error=f"{type(e).__name__}: {e}"))
        return trace
