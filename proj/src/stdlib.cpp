#include "qfc/stdlib.hpp"

#include "qfc/state.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <set>

namespace qfc {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

std::map<std::string, FsKind> fs_table(int k, const std::set<std::string>& self_keys) {
    std::map<std::string, FsKind> fs;
    for (std::uint64_t i = 0; i < (std::uint64_t(1) << k); ++i) {
        std::string s;
        for (int b = k - 1; b >= 0; --b) s += ((i >> b) & 1) ? '1' : '0';
        fs[s] = self_keys.count(s) ? FsKind::SelfRef : FsKind::Ident;
    }
    return fs;
}

std::map<std::string, FsKind> fs_all_self(int k) {
    std::set<std::string> all;
    for (std::uint64_t i = 0; i < (std::uint64_t(1) << k); ++i) {
        std::string s;
        for (int b = k - 1; b >= 0; --b) s += ((i >> b) & 1) ? '1' : '0';
        all.insert(s);
    }
    return fs_table(k, all);
}

TermPtr remove_1() {
    // REMOVE_1 = QRec_1[I, I, SWAP | self, self]: first qubit to the end.
    static TermPtr cached =
        t_kqrec(1, 1, t_id(), t_id(), t_swap(), fs_table(1, {"0", "1"}));
    return cached;
}

TermPtr rep_1() {
    // REP_1 = QRec_1[I, SWAP, I | self, self]: last qubit to the front.
    static TermPtr cached =
        t_kqrec(1, 1, t_id(), t_swap(), t_id(), fs_table(1, {"0", "1"}));
    return cached;
}

bool bits_ok(const std::string& s, int k) {
    if (static_cast<int>(s.size()) != k) return false;
    for (char c : s)
        if (c != '0' && c != '1') return false;
    return true;
}

}  // namespace

TermPtr compo_all(const std::vector<TermPtr>& fs) {
    if (fs.empty()) throw EmptyList("compo_all needs at least one term");
    TermPtr acc = fs.back();
    for (auto it = fs.rbegin() + 1; it != fs.rend(); ++it) acc = t_compo(*it, acc);
    return acc;
}

TermPtr length_guard(int k, TermPtr g) {
    if (k <= 1) return g;  // identity on ell < 1 is identity on the null state only
    return t_switch(k - 1, t_id(), std::move(g));
}

TermPtr basic_gate(const std::string& name, double theta) {
    if (name == "cnot") return t_branch(t_id(), t_not());
    if (name == "z1")
        return t_compo(t_not(), t_compo(t_phase(theta), t_not()));
    if (name == "zrot")
        return t_compo(basic_gate("z1", theta), t_phase(-theta));
    if (name == "gps") {
        if (normalize_angle(theta) == 0.0) return t_id();
        return t_compo(basic_gate("z1", theta), t_phase(theta));
    }
    if (name == "wh") return t_compo(t_not(), t_rot(kPi / 4));
    if (name == "cphase") return t_branch(t_id(), t_phase(theta));
    throw UnknownGate("unknown gate: " + name);
}

TermPtr remove_k(int k) {
    if (k < 1) throw StdlibError("remove_k needs k >= 1");
    std::vector<TermPtr> chain(k, remove_1());
    return length_guard(k, compo_all(chain));
}

TermPtr rep_k(int k) {
    if (k < 1) throw StdlibError("rep_k needs k >= 1");
    std::vector<TermPtr> chain(k, rep_1());
    return length_guard(k, compo_all(chain));
}

TermPtr reverse_term() {
    static TermPtr cached =
        t_kqrec(1, 1, t_id(), remove_1(), t_id(), fs_table(1, {"0", "1"}));
    return cached;
}

TermPtr swap_pos(int i, int j) {
    if (i == j) return t_id();
    if (i > j) std::swap(i, j);
    if (i < 1) throw StdlibError("swap_pos positions are 1-based");
    TermPtr body;
    if (j == i + 1) {
        if (i == 1) return t_swap();
        body = t_compo(rep_k(i - 1), t_compo(t_swap(), remove_k(i - 1)));
    } else {
        TermPtr outer = swap_pos(j - 1, j);
        body = t_compo(outer, t_compo(swap_pos(i, j - 1), outer));
    }
    return length_guard(j, body);
}

TermPtr position_perm(const std::vector<int>& src) {
    int m = static_cast<int>(src.size());
    std::vector<bool> seen(m + 1, false);
    for (int v : src) {
        if (v < 1 || v > m || seen[v]) throw StdlibError("position_perm: not a permutation");
        seen[v] = true;
    }
    // Selection-sort into place; record the swaps in application order.
    std::vector<int> arr(m + 1);
    for (int i = 1; i <= m; ++i) arr[i] = i;
    std::vector<TermPtr> ops;
    for (int i = 1; i <= m; ++i) {
        int want = src[i - 1];
        int j = i;
        while (arr[j] != want) ++j;
        if (j != i) {
            ops.push_back(swap_pos(i, j));
            std::swap(arr[i], arr[j]);
        }
    }
    if (ops.empty()) return t_id();
    TermPtr acc = ops[0];
    for (std::size_t n = 1; n < ops.size(); ++n) acc = t_compo(ops[n], acc);
    return length_guard(m, acc);
}

TermPtr branch_tree(int k, const std::map<std::string, TermPtr>& gs) {
    for (const auto& [s, g] : gs) {
        if (!bits_ok(s, k)) throw StdlibError("branch_tree key '" + s + "' is not a k-bit string");
        if (!g) throw StdlibError("branch_tree: null subterm");
    }
    std::function<TermPtr(const std::string&, int)> rec =
        [&](const std::string& prefix, int depth) -> TermPtr {
        if (depth == 0) {
            auto it = gs.find(prefix);
            return it == gs.end() ? t_id() : it->second;
        }
        TermPtr lo = rec(prefix + "0", depth - 1);
        TermPtr hi = rec(prefix + "1", depth - 1);
        // Branch[I, I] equals I at every length; prune for compact terms.
        if (lo == t_id() && hi == t_id()) return t_id();
        return t_branch(lo, hi);
    };
    return rec("", k);
}

TermPtr branch_family(int k, const std::map<std::string, TermPtr>& gs) {
    if (gs.size() != (std::size_t(1) << k))
        throw IncompleteFamily("branch family must be total on {0,1}^k");
    for (const auto& [s, g] : gs)
        if (!is_meas_free(g))
            throw StdlibError("branch family members must be meas-free");
    return branch_tree(k, gs);
}

TermPtr rev_branch_family(int k, const std::map<std::string, TermPtr>& gs) {
    if (gs.size() != (std::size_t(1) << k))
        throw IncompleteFamily("branch family must be total on {0,1}^k");
    TermPtr tree = branch_family(k, gs);
    return t_compo(remove_k(k), t_compo(tree, rep_k(k)));
}

TermPtr swap_k(int k) {
    if (k < 1) throw StdlibError("swap_k needs k >= 1");
    std::vector<TermPtr> ops;
    for (int i = k; i >= 1; --i) ops.push_back(swap_pos(i, i + k));
    return length_guard(2 * k, compo_all(ops));
}

namespace {

// Multi-controlled NOT on the first k qubits: flips position target when
// every other position matches pattern (keyed by position).
TermPtr mcx(int k, int target, const std::map<int, char>& pattern) {
    if (k == 1) return t_not();
    std::string w(k - 1, '0');
    for (int p = 1; p <= k - 1; ++p) {
        int original = (p == target) ? k : p;
        w[p - 1] = pattern.at(original);
    }
    TermPtr core = branch_tree(k - 1, {{w, t_not()}});
    if (target == k) return core;
    TermPtr pi = swap_pos(target, k);
    return t_compo(pi, t_compo(core, pi));
}

TermPtr transposition(int k, const std::string& u, const std::string& v) {
    std::vector<int> diff;
    for (int i = 0; i < k; ++i)
        if (u[i] != v[i]) diff.push_back(i + 1);
    std::vector<TermPtr> conj;
    std::string cur = u;
    for (std::size_t step = 0; step + 1 < diff.size(); ++step) {
        int d = diff[step];
        std::map<int, char> pattern;
        for (int p = 1; p <= k; ++p)
            if (p != d) pattern[p] = cur[p - 1];
        conj.push_back(mcx(k, d, pattern));
        cur[d - 1] = cur[d - 1] == '0' ? '1' : '0';
    }
    int d_last = diff.back();
    std::map<int, char> pattern;
    for (int p = 1; p <= k; ++p)
        if (p != d_last) pattern[p] = cur[p - 1];
    TermPtr acc = mcx(k, d_last, pattern);
    for (auto it = conj.rbegin(); it != conj.rend(); ++it)
        acc = t_compo(*it, t_compo(acc, *it));
    return acc;
}

}  // namespace

TermPtr lift_bijection(int k, const std::map<std::string, std::string>& table) {
    std::set<std::string> keys, values;
    for (const auto& [from, to] : table) {
        if (!bits_ok(from, k) || !bits_ok(to, k))
            throw NotBijective("lift_bijection entries must be k-bit strings");
        keys.insert(from);
        if (!values.insert(to).second) throw NotBijective("lift_bijection value repeated");
    }
    if (keys != values)
        throw NotBijective("lift_bijection: listed part must be closed (a bijection)");
    // Cycle-decompose; each cycle becomes adjacent transpositions.
    std::vector<TermPtr> ops;
    std::set<std::string> done;
    for (const auto& [start, _] : table) {
        if (done.count(start)) continue;
        std::vector<std::string> cycle;
        std::string cur = start;
        while (!done.count(cur)) {
            done.insert(cur);
            cycle.push_back(cur);
            cur = table.at(cur);
        }
        if (cycle.size() < 2) continue;
        // (c1 c2 ... cm) = (c1 c2)(c2 c3)...(c_{m-1} c_m), rightmost first.
        for (std::size_t i = 0; i + 1 < cycle.size(); ++i)
            ops.push_back(transposition(k, cycle[i], cycle[i + 1]));
    }
    if (ops.empty()) return t_id();
    return length_guard(k, compo_all(ops));
}

TermPtr tensor_split(TermPtr f, int k, TermPtr g) {
    if (k < 1) throw StdlibError("tensor_split needs k >= 1");
    // f on the last k qubits, then rotated to act on the first k.
    TermPtr f_last = t_kqrec(1, k, f, t_id(), t_id(), fs_all_self(1));
    TermPtr f_first = t_compo(rep_k(k), t_compo(f_last, remove_k(k)));
    std::map<std::string, TermPtr> constant;
    for (std::uint64_t i = 0; i < (std::uint64_t(1) << k); ++i) {
        std::string s;
        for (int b = k - 1; b >= 0; --b) s += ((i >> b) & 1) ? '1' : '0';
        constant[s] = g;
    }
    TermPtr g_rest = branch_tree(k, constant);
    return t_switch(k, f, t_compo(g_rest, f_first));
}

TermPtr prefix_skip(TermPtr f, int k) {
    if (k < 1) throw StdlibError("prefix_skip needs k >= 1");
    TermPtr eat = f;
    for (int i = 0; i < k - 1; ++i) eat = t_branch(t_id(), eat);
    return t_kqrec(1, 1, t_id(), t_branch(t_id(), eat), t_id(), fs_table(1, {"0"}));
}

TermPtr counter_loop(TermPtr body) {
    return t_kqrec(1, 1, t_id(), t_branch(prefix_skip(std::move(body), 1), t_id()), t_id(),
                   fs_table(1, {"0"}));
}

TermPtr skip_tilde(TermPtr f) {
    return t_kqrec(2, 1, t_id(), branch_tree(2, {{"11", std::move(f)}}), t_id(),
                   fs_table(2, {"00", "01"}));
}

TermPtr qft(int k) {
    if (k < 1 || k > kDenseCap) throw StdlibError("qft size out of range");
    TermPtr wh = basic_gate("wh");
    auto hadamard_at = [&](int i) -> TermPtr {
        if (i == 1) return wh;
        TermPtr sw = swap_pos(1, i);
        return length_guard(i, t_compo(sw, t_compo(wh, sw)));
    };
    auto cphase_at = [&](double theta, int a, int b) -> TermPtr {
        TermPtr cp = basic_gate("cphase", theta);
        if (a == 1 && b == 2) return cp;
        TermPtr fwd = t_compo(swap_pos(2, b), swap_pos(1, a));
        TermPtr back = t_compo(swap_pos(1, a), swap_pos(2, b));
        return length_guard(b, t_compo(back, t_compo(cp, fwd)));
    };
    std::vector<TermPtr> ops;  // in application order
    for (int i = 1; i <= k; ++i) {
        ops.push_back(hadamard_at(i));
        for (int j = i + 1; j <= k; ++j)
            ops.push_back(cphase_at(kPi / std::ldexp(1.0, j - i - 1) / 2.0, i, j));
    }
    for (int i = 1; i <= k - i + 1 - 1; ++i)
        if (i < k + 1 - i) ops.push_back(swap_pos(i, k + 1 - i));
    TermPtr acc = ops[0];
    for (std::size_t n = 1; n < ops.size(); ++n) acc = t_compo(ops[n], acc);
    return length_guard(k, acc);
}

TermPtr copy2() {
    TermPtr rem2 = remove_k(2);
    TermPtr rep2 = rep_k(2);
    TermPtr not2 = t_compo(t_swap(), t_compo(t_not(), t_swap()));
    // Shed the zero block (and its endmarker) to the register end.
    TermPtr c1 = t_kqrec(2, 1, t_id(), rem2, t_id(), fs_table(2, {"00"}));
    // Per source pair [0 s], pull a zero pair from the end and imprint s.
    TermPtr c2h = branch_tree(2, {{"00", rep2}, {"01", t_compo(not2, rep2)}});
    TermPtr c2 = t_kqrec(2, 1, t_id(), c2h, t_id(), fs_table(2, {"00", "01"}));
    // De-interleave [0s 0s] quads: keep the first copy, shed the second.
    TermPtr d2h = branch_tree(2, {{"00", rem2}, {"01", rem2}});
    std::map<std::string, FsKind> d2fs = fs_table(4, {"0000", "0101"});
    TermPtr d2 = t_kqrec(4, 3, t_id(), d2h, t_id(), d2fs);
    TermPtr pairfix = t_kqrec(2, 1, t_id(), t_id(), t_swap(), fs_table(2, {"00", "01"}));
    return compo_all({skip_tilde(skip_tilde(reverse_term())), skip_tilde(pairfix),
                      skip_tilde(reverse_term()), d2, c2, c1});
}

namespace {

std::complex<double> cmul_det(const Mat2& u) {
    return u[0][0] * u[1][1] - u[0][1] * u[1][0];
}

}  // namespace

TermPtr u2_term(const Mat2& u) {
    constexpr double eps = 1e-12;
    std::complex<double> det = cmul_det(u);
    double alpha = 0.5 * std::arg(det);
    std::complex<double> ph = std::polar(1.0, -alpha);
    Mat2 v{{{u[0][0] * ph, u[0][1] * ph}, {u[1][0] * ph, u[1][1] * ph}}};
    double c = std::abs(v[0][0]);
    double s = std::abs(v[1][0]);
    double gamma = 2.0 * std::atan2(s, c);
    double beta, delta;
    if (s <= eps) {
        beta = -2.0 * std::arg(v[0][0]);
        delta = 0.0;
    } else if (c <= eps) {
        beta = 2.0 * std::arg(v[1][0]);
        delta = 0.0;
    } else {
        beta = std::arg(v[1][0]) - std::arg(v[0][0]);
        delta = -std::arg(v[0][0]) - std::arg(v[1][0]);
    }
    double lambda = alpha - beta / 2.0 - delta / 2.0;
    std::vector<TermPtr> ops;  // application order
    if (normalize_angle(delta) != 0.0) ops.push_back(t_phase(delta));
    if (normalize_angle(gamma / 2.0) != 0.0) ops.push_back(t_rot(gamma / 2.0));
    if (normalize_angle(beta) != 0.0) ops.push_back(t_phase(beta));
    if (normalize_angle(lambda) != 0.0) ops.push_back(basic_gate("gps", lambda));
    if (ops.empty()) return t_id();
    TermPtr acc = ops[0];
    for (std::size_t n = 1; n < ops.size(); ++n) acc = t_compo(ops[n], acc);
    return acc;
}

TermPtr givens_pair(int m, const std::string& a, const std::string& b, const Mat2& u) {
    if (!bits_ok(a, m) || !bits_ok(b, m) || a == b)
        throw StdlibError("givens_pair needs distinct m-bit strings");
    std::string z(m - 1, '0');
    std::string za = z + "0", zb = z + "1";
    TermPtr ctrl = m == 1 ? u2_term(u) : branch_tree(m - 1, {{z, u2_term(u)}});
    if (a == za && b == zb) return ctrl;
    // Permutation sending a -> za, b -> zb (two transpositions composed).
    auto apply1 = [&](const std::string& s, const std::string& x, const std::string& y) {
        return s == x ? y : (s == y ? x : s);
    };
    std::string b1 = apply1(b, a, za);
    std::map<std::string, std::string> table;
    std::set<std::string> affected = {a, b, za, zb, b1};
    for (const auto& s : affected) {
        std::string img = apply1(s, a, za);
        img = apply1(img, b1, zb);
        if (img != s) table[s] = img;
    }
    std::map<std::string, std::string> inv;
    for (const auto& [from, to] : table) inv[to] = from;
    TermPtr fwd = lift_bijection(m, table);
    TermPtr back = lift_bijection(m, inv);
    return t_compo(back, t_compo(ctrl, fwd));
}

TermPtr prefix_phase(int m, const std::string& a, double theta) {
    if (!bits_ok(a, m)) throw StdlibError("prefix_phase needs an m-bit string");
    if (normalize_angle(theta) == 0.0) return t_id();
    return branch_tree(m, {{a, basic_gate("gps", theta)}});
}

namespace {

// Fixed-register-width gate constructions: rotating the target qubit to the
// register end is only position-stable when the width is known exactly, but
// it turns a multi-controlled gate into two cheap rotations plus one pruned
// branch path.
TermPtr controlled_leaf_fixed(int width, int target, const std::map<int, char>& pattern,
                              TermPtr leaf) {
    std::string w(width - 1, '0');
    for (const auto& [p, bit] : pattern) {
        int np = p > target ? p - target : width - target + p;
        w[np - 1] = bit;
    }
    TermPtr core = branch_tree(width - 1, {{w, std::move(leaf)}});
    if (target == width) return core;
    return t_compo(rep_k(target), t_compo(core, remove_k(target)));
}

struct GrayChain {
    std::vector<TermPtr> conj;  // application order
    std::string aligned;        // a with all but the last diff flipped
    int pivot;                  // remaining diff position
};

GrayChain gray_align(int width, const std::string& a, const std::string& b) {
    GrayChain out;
    std::vector<int> diff;
    for (int i = 0; i < width; ++i)
        if (a[i] != b[i]) diff.push_back(i + 1);
    std::string cur = a;
    for (std::size_t step = 0; step + 1 < diff.size(); ++step) {
        int d = diff[step];
        std::map<int, char> pattern;
        for (int p = 1; p <= width; ++p)
            if (p != d) pattern[p] = cur[p - 1];
        out.conj.push_back(controlled_leaf_fixed(width, d, pattern, t_not()));
        cur[d - 1] = cur[d - 1] == '0' ? '1' : '0';
    }
    out.aligned = cur;
    out.pivot = diff.back();
    return out;
}

TermPtr conjugated(const std::vector<TermPtr>& conj, TermPtr center) {
    TermPtr acc = std::move(center);
    for (auto it = conj.rbegin(); it != conj.rend(); ++it)
        acc = t_compo(*it, t_compo(acc, *it));
    return acc;
}

TermPtr givens_fixed(int width, const std::string& a, const std::string& b, const Mat2& u) {
    GrayChain g = gray_align(width, a, b);
    std::map<int, char> pattern;
    for (int p = 1; p <= width; ++p)
        if (p != g.pivot) pattern[p] = b[p - 1];
    Mat2 adjusted = u;
    if (a[g.pivot - 1] == '1') {
        // the aligned a-string carries bit value 1 at the pivot
        adjusted = Mat2{{{u[1][1], u[1][0]}, {u[0][1], u[0][0]}}};
    }
    return conjugated(g.conj,
                      controlled_leaf_fixed(width, g.pivot, pattern, u2_term(adjusted)));
}

TermPtr prefix_phase_padded(int width, const std::string& a, double theta) {
    // A full-width pattern would leave no residual qubit for the phase gate;
    // condition on all but the last bit and phase the matching half.
    if (normalize_angle(theta) == 0.0) return t_id();
    std::string head = a.substr(0, a.size() - 1);
    TermPtr leaf = a.back() == '0' ? basic_gate("z1", theta) : t_phase(theta);
    return branch_tree(static_cast<int>(head.size()), {{head, leaf}});
}

}  // namespace

TermPtr prefix_unitary(
    int m,
    const std::map<std::string, std::vector<std::pair<std::string, std::complex<double>>>>&
        columns,
    int fixed_width) {
    if (fixed_width >= 0 && fixed_width != m)
        throw StdlibError("prefix_unitary: fixed_width must equal the prefix width");
    const bool fixed = fixed_width == m;
    using cplx = std::complex<double>;
    std::set<std::string> involved;
    for (const auto& [in, outs] : columns) {
        if (!bits_ok(in, m)) throw StdlibError("prefix_unitary: bad input string " + in);
        involved.insert(in);
        for (const auto& [out, amp] : outs) {
            if (!bits_ok(out, m)) throw StdlibError("prefix_unitary: bad output string " + out);
            involved.insert(out);
        }
    }
    std::vector<std::string> basis(involved.begin(), involved.end());
    int n = static_cast<int>(basis.size());
    std::map<std::string, int> idx;
    for (int i = 0; i < n; ++i) idx[basis[i]] = i;

    std::vector<std::vector<cplx>> mat(n, std::vector<cplx>(n, cplx(0, 0)));
    std::vector<bool> listed(n, false);
    for (const auto& [in, outs] : columns) {
        int j = idx[in];
        listed[j] = true;
        for (const auto& [out, amp] : outs) mat[idx[out]][j] += amp;
    }
    // Orthonormality of the listed columns is the caller's contract.
    for (const auto& [in1, o1] : columns) {
        for (const auto& [in2, o2] : columns) {
            cplx acc(0, 0);
            for (int r = 0; r < n; ++r) acc += std::conj(mat[r][idx[in1]]) * mat[r][idx[in2]];
            cplx want = in1 == in2 ? cplx(1, 0) : cplx(0, 0);
            if (std::abs(acc - want) > 1e-9)
                throw StdlibError("prefix_unitary: listed columns are not orthonormal");
        }
    }
    // Complete the unlisted columns by Gram-Schmidt over standard basis vectors.
    std::vector<std::vector<cplx>> ortho;  // already-fixed columns
    for (int j = 0; j < n; ++j)
        if (listed[j]) {
            std::vector<cplx> col(n);
            for (int r = 0; r < n; ++r) col[r] = mat[r][j];
            ortho.push_back(std::move(col));
        }
    std::vector<int> todo;
    for (int j = 0; j < n; ++j)
        if (!listed[j]) todo.push_back(j);
    std::size_t next = 0;
    for (int cand = 0; cand < n && next < todo.size(); ++cand) {
        std::vector<cplx> v(n, cplx(0, 0));
        v[cand] = 1;
        for (const auto& col : ortho) {
            cplx ip(0, 0);
            for (int r = 0; r < n; ++r) ip += std::conj(col[r]) * v[r];
            for (int r = 0; r < n; ++r) v[r] -= ip * col[r];
        }
        double nm = 0;
        for (int r = 0; r < n; ++r) nm += std::norm(v[r]);
        nm = std::sqrt(nm);
        if (nm < 1e-6) continue;
        for (int r = 0; r < n; ++r) v[r] /= nm;
        int j = todo[next++];
        for (int r = 0; r < n; ++r) mat[r][j] = v[r];
        ortho.push_back(std::move(v));
    }
    if (next != todo.size()) throw StdlibError("prefix_unitary: completion failed");

    // Two-level (Givens) decomposition: zero the subdiagonal column by column.
    struct Op {
        int r0, r1;
        Mat2 t;  // acts on coordinates (r0, r1)
    };
    std::vector<Op> ops;
    auto apply_rows = [&](const Mat2& t, int r0, int r1) {
        for (int col = 0; col < n; ++col) {
            cplx x = mat[r0][col], y = mat[r1][col];
            mat[r0][col] = t[0][0] * x + t[0][1] * y;
            mat[r1][col] = t[1][0] * x + t[1][1] * y;
        }
    };
    for (int j = 0; j < n; ++j) {
        for (int i = j + 1; i < n; ++i) {
            if (std::abs(mat[i][j]) < 1e-14) continue;
            cplx a = mat[j][j], b = mat[i][j];
            double r = std::sqrt(std::norm(a) + std::norm(b));
            Mat2 t{{{std::conj(a) / r, std::conj(b) / r}, {-b / r, a / r}}};
            apply_rows(t, j, i);
            ops.push_back({j, i, t});
        }
    }
    std::vector<TermPtr> application_order;
    // Residual diagonal phases are applied first.
    for (int j = 0; j < n; ++j) {
        double ang = std::arg(mat[j][j]);
        if (std::abs(ang) > 1e-13)
            application_order.push_back(fixed ? prefix_phase_padded(m, basis[j], ang)
                                              : prefix_phase(m, basis[j], ang));
    }
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        Mat2 dag{{{std::conj(it->t[0][0]), std::conj(it->t[1][0])},
                  {std::conj(it->t[0][1]), std::conj(it->t[1][1])}}};
        application_order.push_back(fixed
                                        ? givens_fixed(m, basis[it->r0], basis[it->r1], dag)
                                        : givens_pair(m, basis[it->r0], basis[it->r1], dag));
    }
    if (application_order.empty()) return t_id();
    TermPtr acc = application_order[0];
    for (std::size_t i = 1; i < application_order.size(); ++i)
        acc = t_compo(application_order[i], acc);
    return acc;
}

}  // namespace qfc
