"""
Metropolis-Hastings sampling of realizations with a three-branch perturbation kernel.

Every random draw of a proposal goes through a chooser that records the decision
and multiplies the reciprocal of the number of options into the proposal
probability. The reverse proposal is the same procedure driven by a scripted
chooser, so forward and reverse probabilities are exact rationals of the form 1/D.
"""
import logging
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from .config_utils import ChainConfig, chain_rng
from .construct_utils import construct_realization
from .errors import InvalidMatrix, NotReversible
from .misc_utils import rational_str
from .model_utils import (ColoredRealization, check_realization,
                          extend_with_nonedge_color, instance_of)
from .trail_utils import Trail, build_aux, walk

logger = logging.getLogger(__name__)

LAZY = 'Lazy'
CIRCUIT_II = 'CircuitII'
TRIPLE_II = 'TripleII'
CIRCUIT_III = 'CircuitIII'
TRIPLE_III = 'TripleIII'
IDENTITY_BAIL = 'IdentityBail'

# probabilities of the lazy branch and of each perturbation branch, identical in
# both directions and left out of every proposal probability
LAZY_PROB = Fraction(1, 2)
BRANCH_PROB = Fraction(1, 4)


class RandomChooser:
    def __init__(self, rng):
        self.rng = rng
        self.denominator = 1
        self.decisions = []

    def choose(self, options, key=None):
        choice = options[int(self.rng.integers(len(options)))]
        self.denominator *= len(options)
        self.decisions.append(key(choice) if key is not None else choice)
        return choice


class ScriptedChooser:
    """
    Replays a decision list; a decision that is not among the options raises NotReversible.
    """
    def __init__(self, decisions):
        self._queue = deque(decisions)
        self.denominator = 1
        self.decisions = []

    @property
    def exhausted(self):
        return not self._queue

    def choose(self, options, key=None):
        if not self._queue:
            raise NotReversible('decision script exhausted')
        wanted = self._queue.popleft()
        for option in options:
            if (key(option) if key is not None else option) == wanted:
                self.denominator *= len(options)
                self.decisions.append(wanted)
                return option
        raise NotReversible(f'decision {wanted!r} is not among {len(options)} options')


def _label(edge):
    return edge.label


def _swapped(matrix, u1, u2, labels):
    out = matrix.copy()
    labels = list(labels)
    out[u1, labels] = matrix[u2, labels]
    out[u2, labels] = matrix[u1, labels]
    return out


class ProposalTrace:
    """
    Decision record of one proposal.

    Rows u, u_prime, u_dprime and colours c0, c, c_prime keep their roles in both
    perturbation branches. Branch II uses first = prefix T on (u, u'), middle = T1 on
    (u', u''), last = T2 on (u, u''). Branch III uses first = prefix T' on (u, u''),
    middle = truncated T1'' on (u'', u'), last = T2' on (u, u').
    """
    def __init__(self, branch, source, k):
        self.branch = branch
        self.source = source
        self.proposal = source
        self.k = k
        self.u = self.u_prime = self.u_dprime = None
        self.c0 = self.c = self.c_prime = None
        self.l = self.l_prime = None
        self.first = self.middle = self.last = None
        self.pivot = None
        self.g_tilde = self.g_bar = None
        self.p_fwd = None
        self.p_rev = None
        self.decisions = []
        self.reason = None
        self.empty_v_prime = False

    @property
    def partner(self):
        """row paired with u in the first trail"""
        return self.u_prime if self.branch in (CIRCUIT_II, TRIPLE_II) else self.u_dprime

    @property
    def is_move(self):
        return self.branch not in (LAZY, IDENTITY_BAIL)

    @property
    def is_circuit(self):
        return self.branch in (CIRCUIT_II, CIRCUIT_III)

    @property
    def proposed(self):
        return ColoredRealization(self.proposal, self.k)

    def bail(self, reason):
        self.branch = IDENTITY_BAIL
        self.reason = reason
        self.proposal = self.source
        return self

    def __repr__(self):
        return f'ProposalTrace({self.branch}, u={self.u}, u\'={self.u_prime}, u\'\'={self.u_dprime}, c0={self.c0}, p_fwd={self.p_fwd})'


def _perturb(G, k, d, branch, chooser):
    """
    Runs perturbation branch II or III on the colour matrix G.
    """
    n, m = G.shape
    triple, circuit = (TRIPLE_II, CIRCUIT_II) if branch == 'II' else (TRIPLE_III, CIRCUIT_III)
    trace = ProposalTrace(triple, G, k)
    try:
        return _perturb_steps(trace, G, n, m, k, d, branch, circuit, chooser)
    finally:
        trace.decisions = list(chooser.decisions)
        trace.p_fwd = Fraction(1, chooser.denominator)


def _perturb_steps(trace, G, n, m, k, d, branch, circuit, chooser):
    if n < 2:
        return trace.bail('fewer than two rows')
    u, partner = chooser.choose([(a, b) for a in range(n) for b in range(n) if a != b])
    c0 = chooser.choose(list(range(k)))
    l = chooser.choose(list(range(1, m + 1)))
    trace.u, trace.c0, trace.l = u, c0, l
    if branch == 'II':
        trace.u_prime = partner
    else:
        trace.u_dprime = partner

    K = build_aux(G, u, partner, k)
    if not K.available(c0):
        return trace.bail(f'colour {c0} has no non-loop edge in K(G, {u}, {partner})')
    edges, _, closed = walk(K, c0, c0, lambda options: chooser.choose(options, key=_label), max_steps=l)
    first = Trail(edges, c0, edges[-1].head)
    trace.first = first

    if closed:
        trace.branch = circuit
        trace.proposal = _swapped(G, u, partner, first.labels)
        return trace
    if n < 3:
        return trace.bail('triple move needs three rows')
    G1 = _swapped(G, u, partner, first.labels)
    third = chooser.choose([w for w in range(n) if w != u and w != partner])

    if branch == 'II':
        u_prime, u_dprime, c = partner, third, first.end
        trace.u_dprime, trace.c = u_dprime, c
        pivots = [v for v in range(m) if G1[u, v] == c]
        assert len(pivots) == d[c] + 1, f'{len(pivots)} pivot columns, expected {d[c] + 1}'
        v = chooser.choose(pivots)
        c_prime = int(G1[u_dprime, v])
        trace.pivot, trace.c_prime = v, c_prime
        if c_prime == c0:
            return trace.bail('pivot colour equals the start colour')
        g_tilde = _swapped(G1, u, u_dprime, [v])
        K1 = build_aux(g_tilde, u_prime, u_dprime, k)
        edges1, _, _ = walk(K1, c0, c, lambda options: chooser.choose(options, key=_label))
        middle = Trail(edges1, c0, c)
        trace.middle, trace.g_tilde = middle, g_tilde
        if c != c_prime and c_prime in middle.colors:
            return trace.bail('repair trail enters the pivot colour')
        g_bar = _swapped(g_tilde, u_prime, u_dprime, middle.labels)
        K2 = build_aux(g_bar, u, u_dprime, k)
        edges2, _, _ = walk(K2, c_prime, c0, lambda options: chooser.choose(options, key=_label))
        last = Trail(edges2, c_prime, c0)
        trace.g_bar, trace.last = g_bar, last
        trace.proposal = _swapped(g_bar, u, u_dprime, last.labels)
        return trace

    u_dprime, u_prime, c_prime = partner, third, first.end
    trace.u_prime, trace.c_prime = u_prime, c_prime
    g_bar = G1
    trace.g_bar = g_bar
    l_prime = chooser.choose(list(range(1, m + 1)))
    trace.l_prime = l_prime
    K1 = build_aux(g_bar, u_dprime, u_prime, k)
    edges1, _, arrived = walk(K1, c0, c_prime, lambda options: chooser.choose(options, key=_label), max_steps=l_prime)
    c = edges1[-1].head
    middle = Trail(edges1, c0, c)
    trace.middle, trace.c = middle, c
    if arrived and len(edges1) < l_prime:
        trace.empty_v_prime = True
        return trace.bail('trail reached its end before the truncation index')
    if c == c0 or c in middle.colors[:-1]:
        trace.empty_v_prime = True
        return trace.bail('truncation colour is the start colour or was entered before')
    g_tilde = _swapped(g_bar, u_dprime, u_prime, middle.labels)
    trace.g_tilde = g_tilde
    candidates = [v for v in range(m) if g_tilde[u, v] == c_prime and g_tilde[u_dprime, v] == c]
    if not candidates:
        trace.empty_v_prime = True
        return trace.bail('no pivot candidate')
    v = chooser.choose(candidates)
    trace.pivot = v
    g_star = _swapped(g_tilde, u, u_dprime, [v])
    K2 = build_aux(g_star, u, u_prime, k)
    edges2, _, _ = walk(K2, c, c0, lambda options: chooser.choose(options, key=_label))
    last = Trail(edges2, c, c0)
    trace.last = last
    trace.proposal = _swapped(g_star, u, u_prime, last.labels)
    return trace


def _row_degrees(R):
    return np.bincount(R.matrix[0], minlength=R.k)


def propose(R, rng):
    """
    One proposal from R: lazy with probability 1/2, otherwise branch II or III with
    probability 1/4 each.

    :param R: ColoredRealization
    :param rng: numpy.random.Generator
    :returns: ProposalTrace
    """
    draw = int(rng.integers(4))
    if draw < 2:
        trace = ProposalTrace(LAZY, R.matrix, R.k)
        return trace
    trace = _perturb(R.matrix, R.k, _row_degrees(R), 'II' if draw == 2 else 'III', RandomChooser(rng))
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(f'Proposed {trace}' + (f' ({trace.reason})' if trace.reason else ''))
    return trace


def reverse_decisions(t):
    """
    Decision list of the paired reverse proposal of a perturbation trace.
    """
    back = lambda trail: [e.label for e in trail.reversed_edges()]
    if t.is_circuit:
        return [(t.u, t.partner), t.c0, t.l] + back(t.first)
    if t.branch == TRIPLE_II:
        return [(t.u, t.u_dprime), t.c0, len(t.last)] + back(t.last) + [t.u_prime, len(t.middle)] \
            + list(t.middle.labels) + [t.pivot] + back(t.first)
    if t.branch == TRIPLE_III:
        return [(t.u, t.u_prime), t.c0, len(t.last)] + back(t.last) + [t.u_dprime, t.pivot] \
            + list(t.middle.labels) + back(t.first)
    raise NotReversible(f'{t.branch} traces have no reverse')


PAIRED = {CIRCUIT_II: CIRCUIT_III, CIRCUIT_III: CIRCUIT_II, TRIPLE_II: TRIPLE_III, TRIPLE_III: TRIPLE_II}


def reverse_trace(t):
    """
    Paired reverse of a perturbation trace, replayed from the proposed state.
    Its p_fwd is the reverse path probability and its p_rev is t.p_fwd.

    :param t: ProposalTrace of a circuit or triple move
    :returns: ProposalTrace
    """
    if not t.is_move:
        raise NotReversible(f'{t.branch} traces have no reverse')
    decisions = reverse_decisions(t)
    chooser = ScriptedChooser(decisions)
    d = np.bincount(t.source[0], minlength=t.k)
    branch = 'III' if t.branch in (CIRCUIT_II, TRIPLE_II) else 'II'
    rt = _perturb(t.proposal, t.k, d, branch, chooser)
    if rt.branch != PAIRED[t.branch] or not chooser.exhausted:
        raise NotReversible(f'reverse of {t} came out as {rt.branch} ({rt.reason})')
    if not np.array_equal(rt.proposal, t.source):
        raise NotReversible(f'reverse of {t} does not return to the source state')
    rt.p_rev = t.p_fwd
    return rt


def acceptance_ratio(t):
    """
    min(1, p_rev / p_fwd); 1 for lazy steps and identity bails.
    """
    if not t.is_move:
        return Fraction(1)
    if t.p_rev is None:
        t.p_rev = reverse_trace(t).p_fwd
    return min(Fraction(1), t.p_rev / t.p_fwd)


def ratio_bounds(m):
    """range every triple-move ratio p_rev / p_fwd lies in"""
    return Fraction(2, m ** 6), Fraction(m ** 5)


class Diagnostics:
    """
    Counters of a chain run. Every step is exactly one of lazy, identity bail,
    circuit move or triple move.
    """
    def __init__(self, m=None):
        self.m = m
        self.total_steps = 0
        self.lazy_steps = 0
        self.identity_bails = 0
        self.circuit_moves = 0
        self.triple_moves = 0
        self.accepted = 0
        self.state_changes = 0
        self.empty_v_prime = 0
        self.min_ratio = None
        self.max_ratio = None
        self.bound_violations = 0
        self.circuit_mismatches = 0

    def record(self, trace, accepted, changed):
        self.total_steps += 1
        if trace.branch == LAZY:
            self.lazy_steps += 1
        elif trace.branch == IDENTITY_BAIL:
            self.identity_bails += 1
            self.empty_v_prime += int(trace.empty_v_prime)
        else:
            if trace.is_circuit:
                self.circuit_moves += 1
                if trace.p_rev != trace.p_fwd:
                    self.circuit_mismatches += 1
            else:
                self.triple_moves += 1
                ratio = trace.p_rev / trace.p_fwd
                self.min_ratio = ratio if self.min_ratio is None else min(self.min_ratio, ratio)
                self.max_ratio = ratio if self.max_ratio is None else max(self.max_ratio, ratio)
                if self.m is not None:
                    low, high = ratio_bounds(self.m)
                    if not low <= ratio <= high:
                        self.bound_violations += 1
                        logger.warning(f'Ratio {ratio} of {trace} outside [{low}, {high}].')
            self.accepted += int(accepted)
        self.state_changes += int(changed)

    @property
    def is_consistent(self):
        return self.total_steps == self.lazy_steps + self.identity_bails + self.circuit_moves + self.triple_moves

    @property
    def move_frequency(self):
        return Fraction(self.state_changes, self.total_steps) if self.total_steps else Fraction(0)

    def merge(self, other):
        for name in ('total_steps', 'lazy_steps', 'identity_bails', 'circuit_moves', 'triple_moves', 'accepted',
                     'state_changes', 'empty_v_prime', 'bound_violations', 'circuit_mismatches'):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        for name, pick in (('min_ratio', min), ('max_ratio', max)):
            values = [x for x in (getattr(self, name), getattr(other, name)) if x is not None]
            setattr(self, name, pick(values) if values else None)
        return self

    def to_dict(self):
        return {
            'totalSteps': self.total_steps,
            'lazySteps': self.lazy_steps,
            'identityBails': self.identity_bails,
            'circuitMoves': self.circuit_moves,
            'tripleMoves': self.triple_moves,
            'accepted': self.accepted,
            'stateChanges': self.state_changes,
            'emptyVPrime': self.empty_v_prime,
            'minRatio': rational_str(self.min_ratio),
            'maxRatio': rational_str(self.max_ratio),
            'boundViolations': self.bound_violations,
            'circuitMismatches': self.circuit_mismatches,
            'lazyProbability': rational_str(LAZY_PROB),
            'branchProbability': rational_str(BRANCH_PROB),
        }

    @classmethod
    def from_dict(cls, data, m=None):
        diag = cls(m)
        for key, name in (('totalSteps', 'total_steps'), ('lazySteps', 'lazy_steps'), ('identityBails', 'identity_bails'),
                          ('circuitMoves', 'circuit_moves'), ('tripleMoves', 'triple_moves'), ('accepted', 'accepted'),
                          ('stateChanges', 'state_changes'), ('emptyVPrime', 'empty_v_prime'),
                          ('boundViolations', 'bound_violations'), ('circuitMismatches', 'circuit_mismatches')):
            setattr(diag, name, data[key])
        diag.min_ratio = Fraction(data['minRatio']) if data['minRatio'] is not None else None
        diag.max_ratio = Fraction(data['maxRatio']) if data['maxRatio'] is not None else None
        return diag


def mh_step(R, rng, M=None, exact=True):
    """
    One Metropolis-Hastings step targeting the uniform distribution.

    :param R: current ColoredRealization
    :param rng: numpy.random.Generator
    :param M: instance, used to verify proposals when exact
    :param exact: verify every proposed state
    :returns: (next state, accepted, trace)
    """
    trace = propose(R, rng)
    if not trace.is_move:
        return R, False, trace
    if exact:
        assert check_realization(M if M is not None else instance_of(R), trace.proposed), f'invalid proposal from {trace}'
    trace.p_rev = reverse_trace(trace).p_fwd
    if exact and trace.is_circuit:
        assert trace.p_rev == trace.p_fwd, f'circuit move with asymmetric probabilities {trace}'
    ratio = trace.p_rev / trace.p_fwd
    threshold = rng.random()
    if ratio >= 1 or Fraction(threshold) < ratio:
        return trace.proposed, True, trace
    return R, False, trace


class ChainRunner:
    """
    One Markov chain: the constructed realization followed by kernel steps.
    """
    def __init__(self, M, config: ChainConfig, chain: int = 0, initial=None):
        """
        :param M: DegreeMatrix, extended with the non-edge colour when needed
        :param config: ChainConfig
        :param chain: chain index, selects the random stream
        :param initial: optional starting realization of the (extended) instance
        """
        report = M.validate()
        if not report.ok:
            raise InvalidMatrix(report.describe())
        self.M = extend_with_nonedge_color(M)
        self.config = config
        self.chain = chain
        self.rng = chain_rng(config.seed, chain)
        self.state = initial if initial is not None else construct_realization(M)
        if not check_realization(self.M, self.state):
            raise InvalidMatrix('initial state does not realize the instance')
        self.diagnostics = Diagnostics(self.M.m)

    def step(self):
        nxt, accepted, trace = mh_step(self.state, self.rng, M=self.M, exact=self.config.exact_replay)
        self.diagnostics.record(trace, accepted, nxt is not self.state and nxt != self.state)
        self.state = nxt
        return trace

    def samples(self):
        """
        Yields (step, realization) for every thin-th step after burn-in, or the
        post burn-in state alone when steps is 0.
        """
        for _ in range(self.config.burnin):
            self.step()
        if self.config.steps == 0:
            yield 0, self.state
        for t in range(1, self.config.steps + 1):
            self.step()
            if t % self.config.thin == 0:
                yield t, self.state
        logger.info(f'Chain {self.chain} finished: {self.diagnostics.state_changes} state changes in {self.diagnostics.total_steps} steps.')


def run_chain(M, config, chain=0, initial=None):
    """
    :returns: (list of (step, ColoredRealization), Diagnostics)
    """
    runner = ChainRunner(M, config, chain=chain, initial=initial)
    samples = list(runner.samples())
    return samples, runner.diagnostics


def _chain_worker(args):
    M, config, chain = args
    samples, diagnostics = run_chain(M, config, chain=chain)
    return chain, [(t, R.matrix) for t, R in samples], diagnostics.to_dict()


def run_chains(M, config, max_workers=None):
    """
    Runs config.chains independent chains in worker processes.

    :returns: list of (chain, samples, Diagnostics) in chain order
    """
    jobs = [(M, config, chain) for chain in range(config.chains)]
    if config.chains == 1:
        results = [_chain_worker(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_chain_worker, jobs))
    k = extend_with_nonedge_color(M).k
    return [(chain, [(t, ColoredRealization(matrix, k)) for t, matrix in samples], Diagnostics.from_dict(diag, M.m))
            for chain, samples, diag in sorted(results, key=lambda r: r[0])]
