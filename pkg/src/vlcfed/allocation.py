"""Joint user selection and per-block bandwidth allocation.

The round-time and energy constraints couple through the bandwidth of each
resource block: selecting more users shrinks every block, which slows links,
which can make marginal users infeasible. The two subproblems have clean
solutions when the other side is fixed:

* ``get_s`` (selection at fixed bandwidth): the time/energy feasibility test
  is separable per user, so the sample-size objective is maximized by taking
  every feasible user.
* ``get_b`` (bandwidth at fixed selection): the rate of every selected user
  grows with its block width, so both band budgets are saturated exactly:
  uplink/downlink blocks get B_rf / (|S| + |S2|) each (uplink for everyone,
  RF downlink for outdoor users only) and VLC blocks get B_vlc / |S1|.

``usba`` alternates the two from a conservative start until the pair is a
fixed point. The alternation can oscillate between an optimistic and a
pessimistic state, so revisited selections are detected and the best visited
state is returned flagged non-converged. ``oracle_enumerate`` exhaustively
scans selection *counts* (bandwidth depends only on counts) as an independent
check on small instances.

In ``rf_only`` mode VLC is disabled: indoor users take their downlink over
RF blocks too (so blocks shrink to B_rf / (2 |S|)), keep their penetration
loss, and drop the gateway backhaul delay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import RfParams, VlcParams, rf_channel_gain, rf_rate, vlc_rate, vlc_sinr
from .compute import cost_breakdown
from .config import SimConfig
from .topology import Topology, UserNode

MODES = ("hybrid", "rf_only")


class EmptySelectionError(ValueError):
    """Bandwidth allocation is undefined for an empty selection."""


@dataclass(frozen=True)
class BandwidthAllocation:
    b_up_hz: float
    b_down_hz: float
    b_vlc_hz: float

    def __post_init__(self):
        if self.b_up_hz <= 0 or self.b_down_hz <= 0 or self.b_vlc_hz <= 0:
            raise ValueError(f"all block widths must be > 0, got {self}")


@dataclass(frozen=True)
class Selection:
    indoor_ids: frozenset[int]
    outdoor_ids: frozenset[int]

    def __post_init__(self):
        if self.indoor_ids & self.outdoor_ids:
            raise ValueError("indoor and outdoor selections must be disjoint")

    @property
    def all_ids(self) -> frozenset[int]:
        return self.indoor_ids | self.outdoor_ids

    @property
    def size(self) -> int:
        return len(self.indoor_ids) + len(self.outdoor_ids)

    def key(self) -> tuple:
        return (tuple(sorted(self.indoor_ids)), tuple(sorted(self.outdoor_ids)))

    def __bool__(self) -> bool:
        return self.size > 0


EMPTY_SELECTION = Selection(frozenset(), frozenset())


@dataclass(frozen=True)
class UsbaResult:
    selection: Selection
    bandwidth: BandwidthAllocation
    iterations: int
    converged: bool
    objective: float  # total training samples across selected users


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def link_rates(
    user: UserNode,
    bw: BandwidthAllocation,
    topology: Topology,
    rf: RfParams,
    vlc: VlcParams,
    mode: str = "hybrid",
) -> tuple[float, float]:
    """(uplink, downlink) rates for one user at the given block widths.

    Uplink is always RF. Downlink is VLC for indoor users in hybrid mode and
    RF otherwise. A VLC downlink out of every AP's field of view yields 0.
    """
    d = math.hypot(
        user.position[0] - topology.bs_position[0],
        user.position[1] - topology.bs_position[1],
    )
    h = rf_channel_gain(d, user.indoor, rf)
    up = rf_rate(user.tx_power_w, h, rf.uplink_interference_w, bw.b_up_hz, rf.noise_psd)
    if mode == "hybrid" and user.indoor:
        sinr = vlc_sinr(user, topology, bw.b_vlc_hz, vlc)
        down = vlc_rate(sinr, bw.b_vlc_hz)
    else:
        down = rf_rate(rf.bs_power_w, h, rf.downlink_interference_w, bw.b_down_hz, rf.noise_psd)
    return up, down


def is_feasible(
    user: UserNode,
    bw: BandwidthAllocation,
    topology: Topology,
    config: SimConfig,
    mode: str = "hybrid",
) -> bool:
    """Can this user finish a round within the time budget and energy cap?"""
    _check_mode(mode)
    rf = RfParams.from_config(config)
    vlc = VlcParams.from_config(config)
    up, down = link_rates(user, bw, topology, rf, vlc, mode)
    if up <= 0.0 or down <= 0.0:
        return False
    include_backhaul = mode == "hybrid" and user.indoor
    cost = cost_breakdown(user, up, down, config, include_backhaul)
    return cost.round_time <= config.t_round_s and cost.total_energy <= user.energy_budget_j


def get_s(
    bw: BandwidthAllocation,
    topology: Topology,
    config: SimConfig,
    mode: str = "hybrid",
) -> Selection:
    """Select every user that is feasible at the given block widths."""
    _check_mode(mode)
    rf = RfParams.from_config(config)
    vlc = VlcParams.from_config(config)
    indoor, outdoor = set(), set()
    for user in topology.users:
        up, down = link_rates(user, bw, topology, rf, vlc, mode)
        if up <= 0.0 or down <= 0.0:
            continue
        include_backhaul = mode == "hybrid" and user.indoor
        cost = cost_breakdown(user, up, down, config, include_backhaul)
        if cost.round_time <= config.t_round_s and cost.total_energy <= user.energy_budget_j:
            (indoor if user.indoor else outdoor).add(user.id)
    return Selection(frozenset(indoor), frozenset(outdoor))


def get_b(selection: Selection, config: SimConfig, mode: str = "hybrid") -> BandwidthAllocation:
    """Widest per-block bandwidths for a selection; both budgets saturate."""
    _check_mode(mode)
    if not selection:
        raise EmptySelectionError("cannot allocate bandwidth to an empty selection")
    n_sel = selection.size
    n_out = len(selection.outdoor_ids)
    n_in = len(selection.indoor_ids)
    if mode == "rf_only":
        rf_blocks = 2 * n_sel  # every selected user takes an uplink and a downlink block
    else:
        rf_blocks = n_sel + n_out
    b_rf = config.rf_total_bandwidth_hz / rf_blocks
    if mode == "hybrid" and n_in > 0:
        b_vlc = config.vlc_total_bandwidth_hz / n_in
    else:
        b_vlc = config.vlc_total_bandwidth_hz  # no VLC blocks issued; width unused
    return BandwidthAllocation(b_up_hz=b_rf, b_down_hz=b_rf, b_vlc_hz=b_vlc)


def selection_objective(selection: Selection, topology: Topology) -> float:
    """Total training samples contributed by the selected users."""
    by_id = {u.id: u for u in topology.users}
    return float(sum(by_id[i].shard_size for i in selection.all_ids))


def default_initial_bandwidth(topology: Topology, config: SimConfig, mode: str = "hybrid") -> BandwidthAllocation:
    """Conservative start: block widths as if every user were selected.

    Both modes start from B_rf / (N + N_outdoor) so the first selection pass
    is an under-approximation that the iteration then grows.
    """
    _check_mode(mode)
    n = max(topology.n_users, 1)
    rf_blocks = n + max(topology.n_outdoor, 0)
    return BandwidthAllocation(
        b_up_hz=config.rf_total_bandwidth_hz / rf_blocks,
        b_down_hz=config.rf_total_bandwidth_hz / rf_blocks,
        b_vlc_hz=config.vlc_total_bandwidth_hz / max(topology.n_indoor, 1),
    )


def _widest_bandwidth(config: SimConfig) -> BandwidthAllocation:
    # Upper envelope over all solo selections; used only to restart from an
    # empty initial selection, never reported as an allocation.
    return BandwidthAllocation(
        b_up_hz=config.rf_total_bandwidth_hz,
        b_down_hz=config.rf_total_bandwidth_hz,
        b_vlc_hz=config.vlc_total_bandwidth_hz,
    )


def usba(topology: Topology, config: SimConfig, mode: str = "hybrid") -> UsbaResult:
    """Alternate selection and bandwidth allocation to a fixed point.

    Starts from the configured (or conservative default) block widths, then
    repeats B_n = get_b(S_{n-1}); S_n = get_s(B_n) until the (selection,
    bandwidth) pair repeats itself exactly. If the initial selection is empty
    the iteration restarts once from the widest solo allocation; if that is
    still empty, the empty result is itself the answer. Oscillations are cut
    off by returning the best-objective visited state flagged non-converged.
    """
    _check_mode(mode)
    if config.initial_bandwidth is not None:
        bw = BandwidthAllocation(*config.initial_bandwidth)
    else:
        bw = default_initial_bandwidth(topology, config, mode)
    if topology.n_users == 0:
        return UsbaResult(EMPTY_SELECTION, bw, 0, True, 0.0)

    selection = get_s(bw, topology, config, mode)
    if not selection:
        widest = _widest_bandwidth(config)
        selection = get_s(widest, topology, config, mode)
        if not selection:
            # Not even a solo allocation admits anyone: empty is a fixed point.
            return UsbaResult(EMPTY_SELECTION, bw, 0, True, 0.0)
        bw = widest

    history: list[tuple[Selection, BandwidthAllocation]] = [(selection, bw)]
    seen = {selection.key()}
    iterations = 0
    converged = False
    for _ in range(config.max_iterations):
        iterations += 1
        new_bw = get_b(selection, config, mode)
        new_selection = get_s(new_bw, topology, config, mode)
        if new_selection == selection:
            if new_bw == bw:
                converged = True
                break
            # Same selection under a refreshed bandwidth (possible only on the
            # first pass, where bw is the arbitrary start): converges next pass.
            bw = new_bw
            history.append((selection, bw))
            continue
        selection, bw = new_selection, new_bw
        history.append((selection, bw))
        if not selection or selection.key() in seen:
            break  # empty states and revisits both mean the alternation cycles
        seen.add(selection.key())

    if not converged:
        # An oscillation visits optimistic states whose members cannot all
        # finish a round at the state's own allocation; those would overstate
        # the objective. Keep only self-supporting states (every member still
        # feasible at get_b of the state) and report the best of them.
        best_sel, best_bw = EMPTY_SELECTION, bw
        best_obj = -1.0
        for cand, _ in history:
            if not cand:
                continue
            cand_bw = get_b(cand, config, mode)
            supported = get_s(cand_bw, topology, config, mode)
            if not (cand.indoor_ids <= supported.indoor_ids and cand.outdoor_ids <= supported.outdoor_ids):
                continue
            obj = selection_objective(cand, topology)
            if obj > best_obj:
                best_obj = obj
                best_sel, best_bw = cand, cand_bw
        selection, bw = best_sel, best_bw

    return UsbaResult(
        selection=selection,
        bandwidth=bw,
        iterations=iterations,
        converged=converged,
        objective=selection_objective(selection, topology),
    )


ORACLE_MAX_USERS = 14


def oracle_enumerate(topology: Topology, config: SimConfig, mode: str = "hybrid") -> UsbaResult:
    """Exhaustive reference optimizer for small instances.

    Block widths depend on the selection only through the indoor/outdoor
    counts, so it suffices to scan every count pair (k1, k2): compute the
    implied widths, check that at least k1 indoor and k2 outdoor users are
    feasible there, fill greedily with the largest shards, and keep the best
    total. Cost grows with the count grid, not with subsets.
    """
    _check_mode(mode)
    if topology.n_users > ORACLE_MAX_USERS:
        raise ValueError(
            f"oracle limited to {ORACLE_MAX_USERS} users, got {topology.n_users}"
        )
    indoor = topology.indoor_users()
    outdoor = topology.outdoor_users()
    # Largest shards first; id breaks ties deterministically.
    indoor.sort(key=lambda u: (-u.shard_size, u.id))
    outdoor.sort(key=lambda u: (-u.shard_size, u.id))

    best_obj = 0.0
    best_sel = EMPTY_SELECTION
    best_bw = None
    for k1 in range(len(indoor) + 1):
        for k2 in range(len(outdoor) + 1):
            if k1 + k2 == 0:
                continue
            if mode == "rf_only":
                rf_blocks = 2 * (k1 + k2)
            else:
                rf_blocks = (k1 + k2) + k2
            b_rf = config.rf_total_bandwidth_hz / rf_blocks
            if mode == "hybrid" and k1 > 0:
                b_vlc = config.vlc_total_bandwidth_hz / k1
            else:
                b_vlc = config.vlc_total_bandwidth_hz
            bw = BandwidthAllocation(b_rf, b_rf, b_vlc)
            feas_in = [u for u in indoor if is_feasible(u, bw, topology, config, mode)]
            feas_out = [u for u in outdoor if is_feasible(u, bw, topology, config, mode)]
            if len(feas_in) < k1 or len(feas_out) < k2:
                continue
            chosen_in = feas_in[:k1]
            chosen_out = feas_out[:k2]
            obj = float(sum(u.shard_size for u in chosen_in + chosen_out))
            if obj > best_obj:
                best_obj = obj
                best_sel = Selection(
                    frozenset(u.id for u in chosen_in),
                    frozenset(u.id for u in chosen_out),
                )
                best_bw = bw
    if best_bw is None:
        best_bw = default_initial_bandwidth(topology, config, mode)
    return UsbaResult(best_sel, best_bw, 0, True, best_obj)
