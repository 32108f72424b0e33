// Derived combinators: standard gates, register rearrangers, branch families,
// lifted classical bijections, prefix-skips, QFT, tilde-code copying, and the
// small synthesis helpers (two-level prefix unitaries) the compiler builds on.
#pragma once

#include <array>
#include <complex>
#include <map>
#include <vector>

#include "qfc/term.hpp"

namespace qfc {

struct StdlibError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownGate : StdlibError {
    using StdlibError::StdlibError;
};
struct EmptyList : StdlibError {
    using StdlibError::StdlibError;
};
struct IncompleteFamily : StdlibError {
    using StdlibError::StdlibError;
};
struct NotBijective : StdlibError {
    using StdlibError::StdlibError;
};

// name in {cnot, z1, zrot, gps, wh, cphase}; theta for the parameterized ones.
TermPtr basic_gate(const std::string& name, double theta = 0.0);

// Applies the list right to left: compo_all({f1,...,fn}) = f1 o f2 o ... o fn.
TermPtr compo_all(const std::vector<TermPtr>& fs);

// Identity on ell < k, g otherwise.
TermPtr length_guard(int k, TermPtr g);

// First k qubits to the end / last k to the front / first k exchanged with
// the next k / full reversal. Identity on registers shorter than the guard.
TermPtr remove_k(int k);
TermPtr rep_k(int k);
TermPtr swap_k(int k);
TermPtr reverse_term();

// Swap qubit positions i and j (1-based); identity when ell < max(i, j).
TermPtr swap_pos(int i, int j);
// Rearrange the first m qubits: output position i holds input src[i-1].
// Identity when ell < m.
TermPtr position_perm(const std::vector<int>& src);

// Branch_k / RevBranch_k families (Lemma-style: identity when ell < k).
// branch_family requires a total table; branch_tree fills missing entries
// with the identity and prunes all-identity subtrees.
TermPtr branch_family(int k, const std::map<std::string, TermPtr>& gs);
TermPtr rev_branch_family(int k, const std::map<std::string, TermPtr>& gs);
TermPtr branch_tree(int k, const std::map<std::string, TermPtr>& gs);

// Lift a classical bijection on {0,1}^k to prefixes; unlisted strings are
// fixed points (the listed part must already be a bijection).
TermPtr lift_bijection(int k, const std::map<std::string, std::string>& table);

// f on ell <= k, else f on the first k qubits tensored with g on the rest.
TermPtr tensor_split(TermPtr f, int k, TermPtr g);

// Maps |0^m 1^k>|phi> to |0^m 1^k> ox f(|phi>) and fixes |0^(m+1)>.
TermPtr prefix_skip(TermPtr f, int k);

// k-qubit quantum Fourier transform acting on the first k qubits.
TermPtr qft(int k);

// COPY_2: |~0^k> ox |s~>|psi>  ->  |s~> ox |s~>|psi> for every k.
TermPtr copy2();

// Fires body once per zero of a leading 0^m 1 counter, on the section past
// the counter; the counter itself is preserved.
TermPtr counter_loop(TermPtr body);

// Applies f past a leading tilde block ([0a]* pairs then the 11 endmarker).
TermPtr skip_tilde(TermPtr f);

using Mat2 = std::array<std::array<std::complex<double>, 2>, 2>;

// Arbitrary single-qubit unitary as a term (ZYZ decomposition into
// GPS/PHASE/ROT); acts on the first qubit.
TermPtr u2_term(const Mat2& u);

// Two-level unitary mixing the m-bit prefixes a and b by u (basis order
// {a, b}); identity on every other prefix.
TermPtr givens_pair(int m, const std::string& a, const std::string& b, const Mat2& u);

// Multiplies the component with m-bit prefix a by e^{i theta}.
TermPtr prefix_phase(int m, const std::string& a, double theta);

// Unitary acting on m-bit prefixes, given as a sparse column map
// (orthonormal listed columns; completed to a unitary, identity elsewhere).
// With fixed_width >= m the construction may assume every input register has
// exactly that many qubits, which permits much cheaper rotation-conjugated
// controlled gates internally.
TermPtr prefix_unitary(
    int m,
    const std::map<std::string, std::vector<std::pair<std::string, std::complex<double>>>>&
        columns,
    int fixed_width = -1);

}  // namespace qfc
