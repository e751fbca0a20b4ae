#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "algebra.hpp"

namespace plp {

using json = nlohmann::ordered_json;

struct PointTag {
    enum Kind { Free, Dependent } kind = Free;
    int a = -1, b = -1;  // parents when Dependent

    static PointTag free() { return {}; }
    static PointTag dep(int a, int b) { return {Dependent, a, b}; }
    bool operator==(const PointTag&) const = default;
};

struct LineTag {
    enum Kind { Free, Adjacent, Spanned } kind = Free;
    int a = -1, b = -1;  // attached point for Adjacent, spanning pair for Spanned

    static LineTag free() { return {}; }
    static LineTag adj(int p) { return {Adjacent, p, -1}; }
    static LineTag span(int a, int b) { return {Spanned, a, b}; }
    bool operator==(const LineTag&) const = default;
};

/** A point-line problem: m views of a labeled point-line arrangement. */
struct PlpInstance {
    int m = 2;
    std::vector<PointTag> points;
    std::vector<LineTag> lines;
    std::set<std::pair<int, int>> incidences;  // (point, line)

    bool operator==(const PlpInstance&) const = default;
};

struct PlpSignature {
    int m = 0, pf = 0, pd = 0, lf = 0, la = 0;

    auto operator<=>(const PlpSignature&) const = default;
    std::string str() const {
        std::ostringstream os;
        os << '(' << m << ',' << pf << ',' << pd << ',' << lf << ',' << la << ')';
        return os.str();
    }
};

struct ValidationReport {
    bool well_formed = true;  // dependencies and index ranges
    bool realizable = true;   // no two lines share two points, spanned lines carry at most 3 points
    bool complete = true;     // incidence set matches the implied geometry
    std::vector<std::string> problems;

    bool valid() const { return well_formed && realizable && complete; }
};

struct InvalidInstance : std::invalid_argument {
    explicit InvalidInstance(const std::string& w) : std::invalid_argument(w) {}
};

// ---------------------------------------------------------------------------
// Generic realization
// ---------------------------------------------------------------------------

/**
 * Homogeneous coordinates of every point for one random realization over
 * F_p (current modulus).  Dependent points are parentA + t * parentB.
 */
inline std::vector<Vec4<Fp>> realize_points(const PlpInstance& inst, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::uint64_t p = Fp::modulus();
    std::vector<Vec4<Fp>> V;
    V.reserve(inst.points.size());
    for (const auto& t : inst.points) {
        Vec4<Fp> x;
        if (t.kind == PointTag::Free) {
            for (auto& c : x) c = Fp::from_residue(rng() % p);
        } else {
            const Fp s = Fp::from_residue(1 + rng() % (p - 1));
            for (int i = 0; i < 4; ++i) x[i] = V[t.a][i] + s * V[t.b][i];
        }
        V.push_back(x);
    }
    return V;
}

/** Rank of a set of homogeneous 4-vectors over F_p. */
inline std::size_t point_rank(const std::vector<Vec4<Fp>>& V, const std::vector<int>& idx) {
    Matrix<Fp> M(idx.size(), 4);
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (int j = 0; j < 4; ++j) M(r, j) = V[idx[r]][j];
    return rank(M);
}

/** Collinearity and coplanarity data of a generic realization. */
struct PointGeometry {
    std::vector<Vec4<Fp>> coords;
    std::vector<std::array<int, 3>> collinear;  // rank-2 triples
    std::vector<std::array<int, 4>> coplanar;   // rank <= 3 quadruples

    std::size_t rank_of(const std::vector<int>& idx) const { return point_rank(coords, idx); }
    bool is_collinear(int a, int b, int c) const {
        std::array<int, 3> t{a, b, c};
        std::sort(t.begin(), t.end());
        return std::binary_search(collinear.begin(), collinear.end(), t);
    }
};

inline constexpr std::uint64_t kGeometrySeed = 0x5eed0001ULL;

inline PointGeometry point_geometry(const PlpInstance& inst) {
    FpContext ctx(kDefaultPrime);
    PointGeometry g;
    g.coords = realize_points(inst, kGeometrySeed);
    const int n = static_cast<int>(g.coords.size());
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c) {
                if (g.rank_of({a, b, c}) <= 2) g.collinear.push_back({a, b, c});
                for (int d = c + 1; d < n; ++d)
                    if (g.rank_of({a, b, c, d}) <= 3) g.coplanar.push_back({a, b, c, d});
            }
    return g;
}

// ---------------------------------------------------------------------------
// Validation and signature
// ---------------------------------------------------------------------------

inline ValidationReport validate(const PlpInstance& inst) {
    ValidationReport rep;
    const int np = static_cast<int>(inst.points.size());
    const int nl = static_cast<int>(inst.lines.size());
    auto fail = [&](bool ValidationReport::*flag, const std::string& msg) {
        rep.*flag = false;
        rep.problems.push_back(msg);
    };

    if (inst.m < 1) fail(&ValidationReport::well_formed, "view count below 1");
    for (int i = 0; i < np; ++i) {
        const auto& t = inst.points[i];
        if (t.kind != PointTag::Dependent) continue;
        if (t.a < 0 || t.b < 0 || t.a >= i || t.b >= i)
            fail(&ValidationReport::well_formed, "point " + std::to_string(i) + ": parents must be earlier points");
        else if (t.a == t.b)
            fail(&ValidationReport::well_formed, "point " + std::to_string(i) + ": parents coincide");
    }
    for (int l = 0; l < nl; ++l) {
        const auto& t = inst.lines[l];
        if (t.kind == LineTag::Adjacent && (t.a < 0 || t.a >= np))
            fail(&ValidationReport::well_formed, "line " + std::to_string(l) + ": attachment out of range");
        if (t.kind == LineTag::Spanned && (t.a < 0 || t.b < 0 || t.a >= np || t.b >= np || t.a == t.b))
            fail(&ValidationReport::well_formed, "line " + std::to_string(l) + ": malformed spanning pair");
    }
    for (const auto& [p, l] : inst.incidences)
        if (p < 0 || p >= np || l < 0 || l >= nl)
            fail(&ValidationReport::well_formed, "incidence out of range");
    if (!rep.well_formed) return rep;

    std::vector<std::vector<int>> on_line(nl);
    for (const auto& [p, l] : inst.incidences) on_line[l].push_back(p);

    // Two distinct lines through the same two distinct points cannot be realized.
    for (int l1 = 0; l1 < nl; ++l1)
        for (int l2 = l1 + 1; l2 < nl; ++l2) {
            int common = 0;
            for (int p : on_line[l1])
                if (std::find(on_line[l2].begin(), on_line[l2].end(), p) != on_line[l2].end()) ++common;
            if (common >= 2)
                fail(&ValidationReport::realizable,
                     "lines " + std::to_string(l1) + " and " + std::to_string(l2) + " share two points");
        }

    const PointGeometry g = point_geometry(inst);
    for (int l = 0; l < nl; ++l) {
        const auto& t = inst.lines[l];
        const auto& pts = on_line[l];
        const std::string name = "line " + std::to_string(l);
        switch (t.kind) {
        case LineTag::Free:
            if (!pts.empty()) fail(&ValidationReport::complete, name + ": free line has incidences");
            break;
        case LineTag::Adjacent:
            if (pts.size() != 1 || pts[0] != t.a)
                fail(&ValidationReport::complete, name + ": adjacent line must meet exactly its attachment point");
            break;
        case LineTag::Spanned: {
            std::vector<int> expect;
            for (int p = 0; p < np; ++p)
                if (p == t.a || p == t.b || g.rank_of({t.a, t.b, p}) <= 2) expect.push_back(p);
            std::vector<int> have = pts;
            std::sort(have.begin(), have.end());
            if (g.rank_of({t.a, t.b}) < 2) fail(&ValidationReport::realizable, name + ": spanning points coincide");
            if (have != expect) fail(&ValidationReport::complete, name + ": incidences differ from the points on the line");
            if (expect.size() > 3) fail(&ValidationReport::realizable, name + ": more than 3 incident points");
            break;
        }
        }
    }
    return rep;
}

inline PlpSignature signature_of(const PlpInstance& inst) {
    const auto rep = validate(inst);
    if (!rep.valid()) throw InvalidInstance("invalid instance: " + rep.problems.front());
    PlpSignature s;
    s.m = inst.m;
    for (const auto& p : inst.points) (p.kind == PointTag::Free ? s.pf : s.pd)++;
    for (const auto& l : inst.lines) {
        if (l.kind == LineTag::Free) ++s.lf;
        if (l.kind == LineTag::Adjacent) ++s.la;
    }
    return s;
}

inline int spanned_line_count(const PlpInstance& inst) {
    return static_cast<int>(std::count_if(inst.lines.begin(), inst.lines.end(),
                                          [](const LineTag& l) { return l.kind == LineTag::Spanned; }));
}

/** Number of adjacent lines attached to each point. */
inline std::vector<int> attachment_counts(const PlpInstance& inst) {
    std::vector<int> c(inst.points.size(), 0);
    for (const auto& l : inst.lines)
        if (l.kind == LineTag::Adjacent) ++c[l.a];
    return c;
}

// ---------------------------------------------------------------------------
// Canonical key
// ---------------------------------------------------------------------------

struct CanonicalLabel {
    std::string text;
    std::uint64_t hash = 0;

    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string s(16, '0');
        for (int i = 0; i < 16; ++i) s[15 - i] = digits[(hash >> (4 * i)) & 0xf];
        return s;
    }
    bool operator==(const CanonicalLabel& o) const { return text == o.text; }
    bool operator<(const CanonicalLabel& o) const { return text < o.text; }
};

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/**
 * Isomorphism-invariant label.  Points are compared through the geometry of a
 * generic realization (collinear triples, coplanar quadruples), so two
 * dependency encodings of the same arrangement get the same label.  Lines
 * enter as free-line count, attachment multiplicities and spanned pairs.
 * The label is the lexicographic minimum over point relabelings, restricted
 * to relabelings that respect a per-point invariant.
 */
inline CanonicalLabel canonical_key(const PlpInstance& inst) {
    const int n = static_cast<int>(inst.points.size());
    const PointGeometry g = point_geometry(inst);
    const auto att = attachment_counts(inst);
    int lf = 0;
    std::vector<std::pair<int, int>> spans;
    for (const auto& l : inst.lines) {
        if (l.kind == LineTag::Free) ++lf;
        if (l.kind == LineTag::Spanned) spans.emplace_back(std::min(l.a, l.b), std::max(l.a, l.b));
    }

    // Per-point invariant used to restrict the permutation search.
    std::vector<std::array<int, 4>> inv(n, {0, 0, 0, 0});
    for (int i = 0; i < n; ++i) inv[i][0] = att[i];
    for (const auto& t : g.collinear)
        for (int i : t) inv[i][1]++;
    for (const auto& q : g.coplanar)
        for (int i : q) inv[i][2]++;
    for (const auto& s : spans) inv[s.first][3]++, inv[s.second][3]++;

    // order[k] = original point placed at canonical slot k; slots grouped by invariant.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return inv[x] < inv[y]; });
    std::vector<std::pair<int, int>> blocks;  // [begin, end) of equal invariants
    for (int i = 0; i < n;) {
        int j = i;
        while (j < n && inv[order[j]] == inv[order[i]]) ++j;
        blocks.emplace_back(i, j);
        i = j;
    }
    for (auto& [b, e] : blocks) std::sort(order.begin() + b, order.begin() + e);

    std::string head;
    {
        std::ostringstream os;
        os << "m" << inst.m << "|n" << n << "|lf" << lf << "|a";
        for (int k = 0; k < n; ++k) os << (k ? "," : ":") << att[order[k]];
        os << "|";
        head = os.str();
    }

    std::string best;
    bool have = false;
    std::vector<int> slot(n);
    auto encode = [&]() {
        for (int k = 0; k < n; ++k) slot[order[k]] = k;
        std::vector<std::array<int, 3>> tri;
        for (const auto& t : g.collinear) {
            std::array<int, 3> u{slot[t[0]], slot[t[1]], slot[t[2]]};
            std::sort(u.begin(), u.end());
            tri.push_back(u);
        }
        std::sort(tri.begin(), tri.end());
        std::vector<std::array<int, 4>> quad;
        for (const auto& q : g.coplanar) {
            std::array<int, 4> u{slot[q[0]], slot[q[1]], slot[q[2]], slot[q[3]]};
            std::sort(u.begin(), u.end());
            quad.push_back(u);
        }
        std::sort(quad.begin(), quad.end());
        std::vector<std::pair<int, int>> sp;
        for (const auto& s : spans) sp.emplace_back(std::min(slot[s.first], slot[s.second]), std::max(slot[s.first], slot[s.second]));
        std::sort(sp.begin(), sp.end());
        std::ostringstream os;
        os << head << "c";
        for (const auto& t : tri) os << ':' << t[0] << '.' << t[1] << '.' << t[2];
        os << "|q";
        for (const auto& q : quad) os << ':' << q[0] << '.' << q[1] << '.' << q[2] << '.' << q[3];
        os << "|s";
        for (const auto& s : sp) os << ':' << s.first << '.' << s.second;
        std::string cand = os.str();
        if (!have || cand < best) best = std::move(cand), have = true;
    };

    // Odometer over the product of per-block permutations.
    std::function<void(std::size_t)> rec = [&](std::size_t bi) {
        if (bi == blocks.size()) {
            encode();
            return;
        }
        auto [b, e] = blocks[bi];
        std::sort(order.begin() + b, order.begin() + e);
        do {
            rec(bi + 1);
        } while (std::next_permutation(order.begin() + b, order.begin() + e));
    };
    rec(0);

    CanonicalLabel lab;
    lab.text = best;
    lab.hash = fnv1a64(best);
    return lab;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline json to_json(const PlpInstance& inst) {
    json j;
    j["m"] = inst.m;
    json pts = json::array();
    for (const auto& p : inst.points) {
        json e;
        if (p.kind == PointTag::Free) {
            e["tag"] = "free";
        } else {
            e["tag"] = "dep";
            e["a"] = p.a;
            e["b"] = p.b;
        }
        pts.push_back(e);
    }
    j["points"] = pts;
    json lines = json::array();
    for (const auto& l : inst.lines) {
        json e;
        switch (l.kind) {
        case LineTag::Free: e["tag"] = "free"; break;
        case LineTag::Adjacent:
            e["tag"] = "adj";
            e["p"] = l.a;
            break;
        case LineTag::Spanned:
            e["tag"] = "span";
            e["a"] = l.a;
            e["b"] = l.b;
            break;
        }
        lines.push_back(e);
    }
    j["lines"] = lines;
    json inc = json::array();
    for (const auto& [p, l] : inst.incidences) inc.push_back(json::array({p, l}));
    j["incidences"] = inc;
    return j;
}

inline PlpInstance instance_from_json(const json& j) {
    PlpInstance inst;
    inst.m = j.at("m").get<int>();
    for (const auto& e : j.at("points")) {
        const auto tag = e.at("tag").get<std::string>();
        if (tag == "free") inst.points.push_back(PointTag::free());
        else if (tag == "dep") inst.points.push_back(PointTag::dep(e.at("a").get<int>(), e.at("b").get<int>()));
        else throw InvalidInstance("unknown point tag " + tag);
    }
    for (const auto& e : j.at("lines")) {
        const auto tag = e.at("tag").get<std::string>();
        if (tag == "free") inst.lines.push_back(LineTag::free());
        else if (tag == "adj") inst.lines.push_back(LineTag::adj(e.at("p").get<int>()));
        else if (tag == "span") inst.lines.push_back(LineTag::span(e.at("a").get<int>(), e.at("b").get<int>()));
        else throw InvalidInstance("unknown line tag " + tag);
    }
    for (const auto& e : j.at("incidences")) inst.incidences.emplace(e.at(0).get<int>(), e.at(1).get<int>());
    return inst;
}

/** Convenience builder: free lines first, then one adjacent line per entry of `attach`. */
inline PlpInstance make_instance(int m, const std::vector<PointTag>& points, int lf, std::vector<int> attach) {
    PlpInstance inst;
    inst.m = m;
    inst.points = points;
    for (int i = 0; i < lf; ++i) inst.lines.push_back(LineTag::free());
    std::sort(attach.begin(), attach.end());
    for (int p : attach) {
        inst.incidences.emplace(p, static_cast<int>(inst.lines.size()));
        inst.lines.push_back(LineTag::adj(p));
    }
    return inst;
}

}  // namespace plp
