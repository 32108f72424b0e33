// Term IR for the schematic quantum function calculus: six initial functions
// (identity, phase, rotation, negation, swap, partial measurement), four
// construction rules (composition, length switching, branching, multi-qubit
// quantum recursion) and a feature-gated controlled-rotation extension.
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace qfc {

enum class Kind { Id, Not, Phase, Rot, Swap, Meas, Crot, Compo, Switch, Branch, KQRec };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Recursion-table entry: a branch either re-enters the enclosing KQRec node
// (SelfRef) or applies the identity.
enum class FsKind { SelfRef, Ident };

struct Term {
    Kind kind;
    double theta = 0.0;  // Phase, Rot; radians in [0, 2pi)
    int bit = 0;         // Meas
    int crot_j = 0;      // Crot; negative j denotes the conjugate rotation
    int t = 0;           // Switch / KQRec length threshold
    int k = 0;           // KQRec prefix width
    TermPtr g, h, p;     // children (Compo uses g = outer, h = inner)
    std::map<std::string, FsKind> fs;  // KQRec branch table, total on {0,1}^k
};

TermPtr t_id();
TermPtr t_not();
TermPtr t_phase(double theta);
TermPtr t_rot(double theta);
TermPtr t_swap();
TermPtr t_meas(int bit);
TermPtr t_crot(int j);
TermPtr t_compo(TermPtr g, TermPtr h);
TermPtr t_switch(int t, TermPtr g, TermPtr h);
TermPtr t_branch(TermPtr g, TermPtr h);
TermPtr t_kqrec(int k, int t, TermPtr g, TermPtr h, TermPtr p,
                std::map<std::string, FsKind> fs);

double normalize_angle(double theta);

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity;
    std::string path;  // slash-separated child path into the term tree
    std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

// Reports every invariant violation. Crot nodes are errors unless the
// extension is enabled.
Diagnostics validate(const TermPtr& t, bool allow_crot = false);

bool is_meas_free(const TermPtr& t);

struct DcReport {
    std::uint64_t total = 0;
    std::uint64_t dag_total = 0;
    std::map<std::string, std::uint64_t> per_constructor;
};

DcReport dc(const TermPtr& t);

struct NotInvertible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scheme-by-scheme inverse; throws NotInvertible on any Meas node.
TermPtr invert(const TermPtr& t);

// Parenthesized prefix text format; parse round-trips print byte-exactly on
// canonical output.
std::string print_term(const TermPtr& t);

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

TermPtr parse_term(const std::string& text);

// Angle literal: decimal radians, "pi/N", or "2pi/N".
double parse_angle(const std::string& tok);

const char* kind_name(Kind k);

}  // namespace qfc
