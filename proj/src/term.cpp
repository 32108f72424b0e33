#include "qfc/term.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace qfc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

TermPtr make(Term t) { return std::make_shared<const Term>(std::move(t)); }

}  // namespace

double normalize_angle(double theta) {
    double r = std::fmod(theta, kTwoPi);
    if (r < 0) r += kTwoPi;
    if (r >= kTwoPi) r = 0;  // guard against fmod rounding at the boundary
    return r;
}

TermPtr t_id() {
    static TermPtr cached = make(Term{Kind::Id});
    return cached;
}
TermPtr t_not() {
    static TermPtr cached = make(Term{Kind::Not});
    return cached;
}
TermPtr t_phase(double theta) {
    Term t{Kind::Phase};
    t.theta = normalize_angle(theta);
    return make(std::move(t));
}
TermPtr t_rot(double theta) {
    Term t{Kind::Rot};
    t.theta = normalize_angle(theta);
    return make(std::move(t));
}
TermPtr t_swap() {
    static TermPtr cached = make(Term{Kind::Swap});
    return cached;
}
TermPtr t_meas(int bit) {
    Term t{Kind::Meas};
    t.bit = bit;
    return make(std::move(t));
}
TermPtr t_crot(int j) {
    Term t{Kind::Crot};
    t.crot_j = j;
    return make(std::move(t));
}
TermPtr t_compo(TermPtr g, TermPtr h) {
    Term t{Kind::Compo};
    t.g = std::move(g);
    t.h = std::move(h);
    return make(std::move(t));
}
TermPtr t_switch(int thr, TermPtr g, TermPtr h) {
    Term t{Kind::Switch};
    t.t = thr;
    t.g = std::move(g);
    t.h = std::move(h);
    return make(std::move(t));
}
TermPtr t_branch(TermPtr g, TermPtr h) {
    Term t{Kind::Branch};
    t.g = std::move(g);
    t.h = std::move(h);
    return make(std::move(t));
}
TermPtr t_kqrec(int k, int thr, TermPtr g, TermPtr h, TermPtr p,
                std::map<std::string, FsKind> fs) {
    Term t{Kind::KQRec};
    t.k = k;
    t.t = thr;
    t.g = std::move(g);
    t.h = std::move(h);
    t.p = std::move(p);
    t.fs = std::move(fs);
    return make(std::move(t));
}

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Id: return "i";
        case Kind::Not: return "not";
        case Kind::Phase: return "phase";
        case Kind::Rot: return "rot";
        case Kind::Swap: return "swap";
        case Kind::Meas: return "meas";
        case Kind::Crot: return "crot";
        case Kind::Compo: return "compo";
        case Kind::Switch: return "switch";
        case Kind::Branch: return "branch";
        case Kind::KQRec: return "kqrec";
    }
    return "?";
}

namespace {

bool valid_bits(const std::string& s) {
    for (char c : s)
        if (c != '0' && c != '1') return false;
    return true;
}

void validate_rec(const TermPtr& t, const std::string& path, bool allow_crot,
                  Diagnostics& out) {
    if (!t) {
        out.push_back({Severity::Error, path, "missing subterm"});
        return;
    }
    switch (t->kind) {
        case Kind::Id:
        case Kind::Not:
        case Kind::Swap:
            break;
        case Kind::Phase:
        case Kind::Rot:
            if (!(t->theta >= 0.0 && t->theta < kTwoPi))
                out.push_back({Severity::Error, path, "angle outside [0, 2pi)"});
            break;
        case Kind::Meas:
            if (t->bit != 0 && t->bit != 1)
                out.push_back({Severity::Error, path, "meas bit must be 0 or 1"});
            break;
        case Kind::Crot:
            if (!allow_crot)
                out.push_back({Severity::Error, path,
                               "crot extension is disabled"});
            if (t->crot_j == 0)
                out.push_back({Severity::Error, path, "crot needs j != 0"});
            break;
        case Kind::Compo:
            validate_rec(t->g, path + "/g", allow_crot, out);
            validate_rec(t->h, path + "/h", allow_crot, out);
            break;
        case Kind::Switch:
            if (t->t < 1)
                out.push_back({Severity::Error, path, "switch threshold t must be >= 1"});
            validate_rec(t->g, path + "/g", allow_crot, out);
            validate_rec(t->h, path + "/h", allow_crot, out);
            break;
        case Kind::Branch:
            validate_rec(t->g, path + "/g", allow_crot, out);
            validate_rec(t->h, path + "/h", allow_crot, out);
            break;
        case Kind::KQRec: {
            if (t->k < 1) out.push_back({Severity::Error, path, "kqrec needs k >= 1"});
            if (t->t < 1) out.push_back({Severity::Error, path, "kqrec needs t >= 1"});
            if (t->t < t->k - 1)
                out.push_back({Severity::Error, path,
                               "t < k-1: recursion could meet an undersized register"});
            std::size_t want = t->k >= 1 && t->k < 30 ? (std::size_t(1) << t->k) : 0;
            if (t->fs.size() != want)
                out.push_back({Severity::Error, path,
                               "fs table must be total on {0,1}^k"});
            bool any_self = false;
            for (const auto& [s, v] : t->fs) {
                if (static_cast<int>(s.size()) != t->k || !valid_bits(s))
                    out.push_back({Severity::Error, path, "fs key '" + s + "' is not a k-bit string"});
                if (v == FsKind::SelfRef) any_self = true;
            }
            if (!any_self)
                out.push_back({Severity::Error, path, "no SelfRef branch in fs"});
            if (t->p && !is_meas_free(t->p))
                out.push_back({Severity::Error, path + "/p",
                               "kqrec preprocessing p must be meas-free"});
            validate_rec(t->g, path + "/g", allow_crot, out);
            validate_rec(t->h, path + "/h", allow_crot, out);
            validate_rec(t->p, path + "/p", allow_crot, out);
            break;
        }
    }
}

}  // namespace

Diagnostics validate(const TermPtr& t, bool allow_crot) {
    Diagnostics out;
    validate_rec(t, "", allow_crot, out);
    return out;
}

bool is_meas_free(const TermPtr& t) {
    if (!t) return true;
    if (t->kind == Kind::Meas) return false;
    return is_meas_free(t->g) && is_meas_free(t->h) && is_meas_free(t->p);
}

namespace {

struct DcCtx {
    std::unordered_map<const Term*, std::uint64_t> tree_memo;
    std::unordered_map<const Term*, std::uint64_t> id_memo;
    std::unordered_map<std::string, std::uint64_t> structural;
    std::unordered_map<const Term*, bool> counted_per_ctor;
    DcReport report;
    std::uint64_t next_id = 0;

    std::uint64_t structural_id(const TermPtr& t) {
        auto it = id_memo.find(t.get());
        if (it != id_memo.end()) return it->second;
        std::ostringstream key;
        key << kind_name(t->kind) << '|' << t->theta << '|' << t->bit << '|'
            << t->crot_j << '|' << t->t << '|' << t->k;
        if (t->g) key << "|g" << structural_id(t->g);
        if (t->h) key << "|h" << structural_id(t->h);
        if (t->p) key << "|p" << structural_id(t->p);
        for (const auto& [s, v] : t->fs) key << '|' << s << (v == FsKind::SelfRef ? 's' : 'i');
        auto [sit, inserted] = structural.try_emplace(key.str(), next_id);
        if (inserted) ++next_id;
        id_memo[t.get()] = sit->second;
        return sit->second;
    }

    std::uint64_t tree_count(const TermPtr& t) {
        auto it = tree_memo.find(t.get());
        if (it != tree_memo.end()) return it->second;
        std::uint64_t n = 1;
        if (t->g) n += tree_count(t->g);
        if (t->h) n += tree_count(t->h);
        if (t->p) n += tree_count(t->p);
        tree_memo[t.get()] = n;
        return n;
    }

    void count_ctor(const TermPtr& t) {
        if (counted_per_ctor.count(t.get())) return;
        counted_per_ctor[t.get()] = true;
        if (t->g) count_ctor(t->g);
        if (t->h) count_ctor(t->h);
        if (t->p) count_ctor(t->p);
    }
};

// per_constructor counts tree occurrences; shared pointers would undercount,
// so walk with a multiplicity accumulator instead.
void ctor_counts(const TermPtr& t, std::map<std::string, std::uint64_t>& out,
                 std::unordered_map<const Term*, std::map<std::string, std::uint64_t>>& memo) {
    auto it = memo.find(t.get());
    if (it == memo.end()) {
        std::map<std::string, std::uint64_t> acc;
        acc[kind_name(t->kind)] += 1;
        if (t->g) ctor_counts(t->g, acc, memo);
        if (t->h) ctor_counts(t->h, acc, memo);
        if (t->p) ctor_counts(t->p, acc, memo);
        it = memo.emplace(t.get(), std::move(acc)).first;
    }
    for (const auto& [k, v] : it->second) out[k] += v;
}

}  // namespace

DcReport dc(const TermPtr& t) {
    DcCtx ctx;
    DcReport r;
    r.total = ctx.tree_count(t);
    ctx.structural_id(t);
    r.dag_total = ctx.next_id;
    std::unordered_map<const Term*, std::map<std::string, std::uint64_t>> memo;
    ctor_counts(t, r.per_constructor, memo);
    return r;
}

TermPtr invert(const TermPtr& t) {
    switch (t->kind) {
        case Kind::Id: return t;
        case Kind::Not: return t;
        case Kind::Swap: return t;
        case Kind::Phase: return t_phase(-t->theta);
        case Kind::Rot: return t_rot(-t->theta);
        case Kind::Meas: throw NotInvertible("meas has no inverse");
        case Kind::Crot: return t_crot(-t->crot_j);
        case Kind::Compo: return t_compo(invert(t->h), invert(t->g));
        case Kind::Switch: return t_switch(t->t, invert(t->g), invert(t->h));
        case Kind::Branch: return t_branch(invert(t->g), invert(t->h));
        case Kind::KQRec:
            // Note the h/p swap: kqrec_t[g,h,p|F]^-1 = kqrec_t[g^-1,p^-1,h^-1|F].
            return t_kqrec(t->k, t->t, invert(t->g), invert(t->p), invert(t->h), t->fs);
    }
    throw NotInvertible("unknown term kind");
}

namespace {

void print_rec(const TermPtr& t, std::ostringstream& os) {
    os << '(' << kind_name(t->kind);
    char buf[64];
    switch (t->kind) {
        case Kind::Id:
        case Kind::Not:
        case Kind::Swap:
            break;
        case Kind::Phase:
        case Kind::Rot:
            std::snprintf(buf, sizeof buf, " %.17g", t->theta);
            os << buf;
            break;
        case Kind::Meas:
            os << ' ' << t->bit;
            break;
        case Kind::Crot:
            os << ' ' << t->crot_j;
            break;
        case Kind::Compo:
        case Kind::Branch:
            os << ' ';
            print_rec(t->g, os);
            os << ' ';
            print_rec(t->h, os);
            break;
        case Kind::Switch:
            os << ' ' << t->t << ' ';
            print_rec(t->g, os);
            os << ' ';
            print_rec(t->h, os);
            break;
        case Kind::KQRec:
            os << ' ' << t->k << ' ' << t->t << " :g ";
            print_rec(t->g, os);
            os << " :h ";
            print_rec(t->h, os);
            os << " :p ";
            print_rec(t->p, os);
            os << " :fs";
            for (const auto& [s, v] : t->fs)
                os << ' ' << s << '=' << (v == FsKind::SelfRef ? "self" : "id");
            break;
    }
    os << ')';
}

struct Lexer {
    const std::string& src;
    std::size_t pos = 0;

    explicit Lexer(const std::string& s) : src(s) {}

    void skip_ws() {
        while (pos < src.size() && (std::isspace(static_cast<unsigned char>(src[pos])) != 0))
            ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= src.size();
    }
    char peek() {
        skip_ws();
        if (pos >= src.size()) throw ParseError("unexpected end of term text");
        return src[pos];
    }
    void expect(char c) {
        if (peek() != c) throw ParseError(std::string("expected '") + c + "' in term text");
        ++pos;
    }
    std::string atom() {
        skip_ws();
        std::size_t start = pos;
        while (pos < src.size() && src[pos] != '(' && src[pos] != ')' &&
               std::isspace(static_cast<unsigned char>(src[pos])) == 0)
            ++pos;
        if (start == pos) throw ParseError("expected atom in term text");
        return src.substr(start, pos - start);
    }
};

int parse_int(const std::string& s) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw ParseError("bad integer: " + s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad integer: " + s);
    }
}

TermPtr parse_rec(Lexer& lx) {
    lx.expect('(');
    std::string head = lx.atom();
    TermPtr result;
    if (head == "i") {
        result = t_id();
    } else if (head == "not") {
        result = t_not();
    } else if (head == "swap") {
        result = t_swap();
    } else if (head == "phase") {
        result = t_phase(parse_angle(lx.atom()));
    } else if (head == "rot") {
        result = t_rot(parse_angle(lx.atom()));
    } else if (head == "meas") {
        result = t_meas(parse_int(lx.atom()));
    } else if (head == "crot") {
        result = t_crot(parse_int(lx.atom()));
    } else if (head == "compo") {
        TermPtr g = parse_rec(lx);
        TermPtr h = parse_rec(lx);
        result = t_compo(g, h);
    } else if (head == "branch") {
        TermPtr g = parse_rec(lx);
        TermPtr h = parse_rec(lx);
        result = t_branch(g, h);
    } else if (head == "switch") {
        int thr = parse_int(lx.atom());
        TermPtr g = parse_rec(lx);
        TermPtr h = parse_rec(lx);
        result = t_switch(thr, g, h);
    } else if (head == "kqrec") {
        int k = parse_int(lx.atom());
        int thr = parse_int(lx.atom());
        TermPtr g, h, p;
        std::map<std::string, FsKind> fs;
        while (lx.peek() != ')') {
            std::string key = lx.atom();
            if (key == ":g")
                g = parse_rec(lx);
            else if (key == ":h")
                h = parse_rec(lx);
            else if (key == ":p")
                p = parse_rec(lx);
            else if (key == ":fs") {
                while (lx.peek() != ')') {
                    std::string entry = lx.atom();
                    auto eq = entry.find('=');
                    if (eq == std::string::npos) throw ParseError("bad fs entry: " + entry);
                    std::string bits = entry.substr(0, eq);
                    std::string val = entry.substr(eq + 1);
                    if (val == "self")
                        fs[bits] = FsKind::SelfRef;
                    else if (val == "id")
                        fs[bits] = FsKind::Ident;
                    else
                        throw ParseError("fs value must be self or id: " + entry);
                }
            } else {
                throw ParseError("unexpected token in kqrec: " + key);
            }
        }
        if (!g || !h || !p) throw ParseError("kqrec needs :g :h :p");
        result = t_kqrec(k, thr, g, h, p, std::move(fs));
    } else {
        throw ParseError("unknown constructor: " + head);
    }
    lx.expect(')');
    return result;
}

}  // namespace

std::string print_term(const TermPtr& t) {
    std::ostringstream os;
    print_rec(t, os);
    return os.str();
}

TermPtr parse_term(const std::string& text) {
    Lexer lx(text);
    TermPtr t = parse_rec(lx);
    if (!lx.eof()) throw ParseError("trailing input after term");
    return t;
}

double parse_angle(const std::string& tok) {
    // Accepted literal forms: decimal radians, pi/N, 2pi/N.
    auto parse_denom = [&](std::size_t prefix_len, double numer) {
        std::string rest = tok.substr(prefix_len);
        if (rest.empty()) return normalize_angle(numer);
        if (rest[0] != '/') throw ParseError("bad angle literal: " + tok);
        double d = std::strtod(rest.c_str() + 1, nullptr);
        if (d == 0) throw ParseError("bad angle literal: " + tok);
        return normalize_angle(numer / d);
    };
    if (tok.rfind("2pi", 0) == 0) return parse_denom(3, kTwoPi);
    if (tok.rfind("pi", 0) == 0) return parse_denom(2, kTwoPi / 2);
    if (tok.rfind("-2pi", 0) == 0) return parse_denom(4, -kTwoPi);
    if (tok.rfind("-pi", 0) == 0) return parse_denom(3, -kTwoPi / 2);
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == nullptr || *end != '\0') throw ParseError("bad angle literal: " + tok);
    return normalize_angle(v);
}

}  // namespace qfc
