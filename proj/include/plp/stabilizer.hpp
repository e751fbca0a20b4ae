#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "data.hpp"
#include "incidence.hpp"
#include "jacobian.hpp"

namespace plp {

/** m * dim C' + dim X' >= m * dim Y'. */
inline bool inequality_holds(int m, int dimCPrime, int dimXPrime, int dimYPrime) {
    return m * dimCPrime + dimXPrime >= m * dimYPrime;
}

/** Affine function a * l + b of the free variable of a reduced problem. */
struct Affine {
    int a = 0, b = 0;
    int operator()(int l) const { return a * l + b; }
};

struct ReducedSubproblem {
    std::string id;
    std::string pattern;
    std::string stabilizer;
    int dimCPrime = 0;
    Affine dimXPrime, dimYPrime;
    int min_free = 0;               // smallest value of the free variable giving dim X' >= 0
    std::vector<int> stored_bounds;  // one per m-bucket, -1 = violated for every value
    std::vector<int> bounds;         // re-derived from the dims
};

struct CriterionRederivationError : std::runtime_error {
    explicit CriterionRederivationError(const std::string& w) : std::runtime_error(w) {}
};

/**
 * Largest value l >= 0 of the free variable such that the inequality holds,
 * -1 if it already fails at 0.  Returns kUnbounded if it holds up to 64.
 */
inline constexpr int kUnbounded = 1 << 20;

inline int derive_bound(const ReducedSubproblem& r, int m) {
    int best = -1;
    for (int l = 0; l <= 64; ++l)
        if (inequality_holds(m, r.dimCPrime, r.dimXPrime(l), r.dimYPrime(l))) best = l;
    return best == 64 ? kUnbounded : best;
}

class CriteriaTable {
public:
    /** Parses the table and checks every stored bound against the inequality at every m in its bucket. */
    explicit CriteriaTable(const std::string& text) {
        json j;
        try {
            j = json::parse(text);
        } catch (const std::exception& e) {
            throw CriterionRederivationError(std::string("criteria file unreadable: ") + e.what());
        }
        for (const auto& b : j.at("buckets")) buckets_.emplace_back(b.at(0).get<int>(), b.at(1).get<int>());
        for (const auto& e : j.at("rows")) {
            ReducedSubproblem r;
            r.id = e.at("id").get<std::string>();
            r.pattern = e.value("pattern", "");
            r.stabilizer = e.value("stabilizer", "");
            r.dimCPrime = e.at("c").get<int>();
            r.dimXPrime = {e.at("x").at(0).get<int>(), e.at("x").at(1).get<int>()};
            r.dimYPrime = {e.at("y").at(0).get<int>(), e.at("y").at(1).get<int>()};
            r.min_free = e.at("min_la").get<int>();
            for (const auto& b : e.at("bounds")) r.stored_bounds.push_back(b.get<int>());
            if (r.stored_bounds.size() != buckets_.size())
                throw CriterionRederivationError("criterion " + r.id + ": bound count differs from bucket count");
            if (r.dimCPrime > 11 || r.dimCPrime < 0)
                throw CriterionRederivationError("criterion " + r.id + ": reduced camera dimension out of range");
            for (std::size_t k = 0; k < buckets_.size(); ++k) {
                const auto [lo, hi] = buckets_[k];
                const int stored = r.stored_bounds[k];
                for (int m = lo; m <= hi; ++m) {
                    const int derived = derive_bound(r, m);
                    const bool at = stored < 0 || inequality_holds(m, r.dimCPrime, r.dimXPrime(stored), r.dimYPrime(stored));
                    const bool above = inequality_holds(m, r.dimCPrime, r.dimXPrime(stored + 1), r.dimYPrime(stored + 1));
                    if (derived != stored || !at || above) {
                        std::ostringstream os;
                        os << "criterion " << r.id << " at m=" << m << ": stored bound " << stored
                           << " but the reduced dimensions give " << derived;
                        throw CriterionRederivationError(os.str());
                    }
                }
                r.bounds.push_back(stored);
            }
            rows_.push_back(std::move(r));
        }
        for (const char* id : {"1", "2", "3", "4", "5", "6", "7", "8", "H1", "H2"})
            if (!find(id)) throw CriterionRederivationError(std::string("criterion ") + id + " missing");
    }

    const std::vector<ReducedSubproblem>& rows() const { return rows_; }
    const std::vector<std::pair<int, int>>& buckets() const { return buckets_; }

    const ReducedSubproblem* find(const std::string& id) const {
        for (const auto& r : rows_)
            if (r.id == id) return &r;
        return nullptr;
    }

    /** Bound of a criterion at m, or nullopt when m lies outside every bucket. */
    std::optional<int> bound(const std::string& id, int m) const {
        const auto* r = find(id);
        if (!r) return std::nullopt;
        for (std::size_t k = 0; k < buckets_.size(); ++k)
            if (buckets_[k].first <= m && m <= buckets_[k].second) return r->bounds[k];
        return std::nullopt;
    }

private:
    std::vector<std::pair<int, int>> buckets_;
    std::vector<ReducedSubproblem> rows_;
};

struct CriterionHit {
    std::string id;
    std::vector<int> points;  // matched points, the loaded point first for criteria 1-7
    int value = 0;            // observed count
    int bound = 0;            // largest allowed count

    std::string describe() const {
        std::ostringstream os;
        os << "criterion " << id << ": " << value << " > " << bound;
        return os.str();
    }
};

/** Smallest and largest m at which criteria 1-8 are evaluated. */
inline constexpr int kCriteriaMinM = 3;
inline constexpr int kCriteriaMaxM = 8;

/**
 * Every violated necessary condition.  H1 and H2 apply for m >= 2; criteria
 * 1-8 apply for 3 <= m <= 8 and report nothing outside that range.
 */
inline std::vector<CriterionHit> scan_criteria(const PlpInstance& inst, const CriteriaTable& table) {
    std::vector<CriterionHit> hits;
    const PointGeometry g = point_geometry(inst);
    const int n = static_cast<int>(inst.points.size());
    const int m = inst.m;
    const auto att = attachment_counts(inst);
    int lf = 0;
    for (const auto& l : inst.lines) lf += l.kind == LineTag::Free;
    auto rk = [&](std::vector<int> idx) { return static_cast<int>(g.rank_of(idx)); };

    if (m >= 2) {
        // H1: a line through two points carrying two or more further points.
        std::set<std::vector<int>> seen_lines;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                std::vector<int> on{a, b};
                for (int c = 0; c < n; ++c)
                    if (c != a && c != b && g.is_collinear(a, b, c)) on.push_back(c);
                std::sort(on.begin(), on.end());
                const int extra = static_cast<int>(on.size()) - 2;
                const auto bnd = table.bound("H1", std::clamp(m, 3, 8)).value_or(1);
                if (extra > bnd && seen_lines.insert(on).second) hits.push_back({"H1", on, extra, bnd});
            }
        // H2: a plane with six or more points.
        std::set<std::vector<int>> seen_planes;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                for (int c = b + 1; c < n; ++c) {
                    if (rk({a, b, c}) != 3) continue;
                    std::vector<int> plane;
                    for (int d = 0; d < n; ++d)
                        if (rk({a, b, c, d}) == 3) plane.push_back(d);
                    if (plane.size() >= 6 && seen_planes.insert(plane).second)
                        hits.push_back({"H2", plane, static_cast<int>(plane.size()), 5});
                }
    }
    if (m < kCriteriaMinM || m > kCriteriaMaxM) return hits;

    for (int P = 0; P < n; ++P) {
        const int a = att[P];
        if (a == 0) continue;
        std::vector<int> others;
        for (int i = 0; i < n; ++i)
            if (i != P) others.push_back(i);
        const int no = static_cast<int>(others.size());

        // Largest number of points in general position containing P (capped at 4), with a witness.
        int k = 1;
        std::vector<int> witness{P};
        for (int i = 0; i < no && k < 2; ++i) k = 2, witness = {P, others[i]};
        for (int i = 0; i < no && k < 3; ++i)
            for (int j = i + 1; j < no && k < 3; ++j)
                if (rk({P, others[i], others[j]}) == 3) k = 3, witness = {P, others[i], others[j]};
        for (int i = 0; i < no && k < 4; ++i)
            for (int j = i + 1; j < no && k < 4; ++j)
                for (int l = j + 1; l < no && k < 4; ++l)
                    if (rk({P, others[i], others[j], others[l]}) == 4) k = 4, witness = {P, others[i], others[j], others[l]};
        for (int row = 1; row <= k; ++row) {
            const int b = *table.bound(std::to_string(row), m);
            if (a > b) hits.push_back({std::to_string(row), {witness.begin(), witness.begin() + row}, a, b});
        }

        // 5: P with Q1, Q2 spanning a plane, and a further point R on the line Q1 Q2.
        {
            const int b = *table.bound("5", m);
            bool done = false;
            for (int i = 0; i < no && !done && a > b; ++i)
                for (int j = i + 1; j < no && !done; ++j) {
                    const int q1 = others[i], q2 = others[j];
                    if (rk({P, q1, q2}) != 3) continue;
                    for (int R = 0; R < n && !done; ++R)
                        if (R != P && R != q1 && R != q2 && g.is_collinear(q1, q2, R))
                            hits.push_back({"5", {P, q1, q2, R}, a, b}), done = true;
                }
        }
        // 6: P with Q1, Q2, Q3 spanning space, and R on the line through two of the Q's.
        {
            const int b = *table.bound("6", m);
            bool done = false;
            for (int i = 0; i < no && !done && a > b; ++i)
                for (int j = i + 1; j < no && !done; ++j)
                    for (int l = j + 1; l < no && !done; ++l) {
                        const std::array<int, 3> q{others[i], others[j], others[l]};
                        if (rk({P, q[0], q[1], q[2]}) != 4) continue;
                        for (auto [x, y] : {std::pair{0, 1}, {0, 2}, {1, 2}})
                            for (int R = 0; R < n && !done; ++R)
                                if (R != P && R != q[0] && R != q[1] && R != q[2] && g.is_collinear(q[x], q[y], R))
                                    hits.push_back({"6", {P, q[0], q[1], q[2], R}, a, b}), done = true;
                    }
        }
        // 7: P on two collinear triples that together span a plane.
        {
            const int b = *table.bound("7", m);
            std::vector<std::array<int, 3>> tri;
            for (const auto& t : g.collinear)
                if (t[0] == P || t[1] == P || t[2] == P) tri.push_back(t);
            bool done = false;
            for (std::size_t i = 0; i < tri.size() && !done && a > b; ++i)
                for (std::size_t j = i + 1; j < tri.size() && !done; ++j) {
                    std::set<int> u(tri[i].begin(), tri[i].end());
                    u.insert(tri[j].begin(), tri[j].end());
                    std::vector<int> uv(u.begin(), u.end());
                    if (rk(uv) == 3) hits.push_back({"7", uv, a, b}), done = true;
                }
        }
    }

    // 8: a plane with at least five points and a line not attached inside it.
    std::set<std::vector<int>> seen;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c) {
                if (rk({a, b, c}) != 3) continue;
                std::vector<int> plane;
                for (int d = 0; d < n; ++d)
                    if (rk({a, b, c, d}) == 3) plane.push_back(d);
                if (plane.size() < 5 || !seen.insert(plane).second) continue;
                int outside = lf;
                for (const auto& l : inst.lines)
                    if (l.kind == LineTag::Adjacent && !std::binary_search(plane.begin(), plane.end(), l.a)) ++outside;
                if (outside > 0) hits.push_back({"8", plane, outside, 0});
            }
    return hits;
}

// ---------------------------------------------------------------------------
// Elimination ledger
// ---------------------------------------------------------------------------

struct LedgerEntry {
    std::string id;
    PlpInstance instance;
    CanonicalLabel key;
    std::array<int, 4> subproblem{};  // (pf, pd, lf, la) of the subarrangement
    int removed_free_lines = 0;
    int removed_adjacent_lines = 0;
    std::string kind;
    std::string constraint;
};

class EliminationLedger {
public:
    explicit EliminationLedger(const std::string& text) {
        const json j = json::parse(text);
        for (const auto& e : j.at("entries")) {
            LedgerEntry le;
            le.id = e.at("id").get<std::string>();
            le.instance = instance_from_json(e.at("instance"));
            le.key = canonical_key(le.instance);
            for (int k = 0; k < 4; ++k) le.subproblem[k] = e.at("subproblem").at(k).get<int>();
            le.removed_free_lines = e.at("removed").at("free_lines").get<int>();
            le.removed_adjacent_lines = e.at("removed").at("adjacent_lines").get<int>();
            le.kind = e.at("kind").get<std::string>();
            le.constraint = e.at("constraint").get<std::string>();
            if (index_.count(le.key.text)) throw std::runtime_error("duplicate ledger entry " + le.id);
            index_[le.key.text] = entries_.size();
            entries_.push_back(std::move(le));
        }
    }
    const std::vector<LedgerEntry>& entries() const { return entries_; }
    const LedgerEntry* find(const CanonicalLabel& key) const {
        auto it = index_.find(key.text);
        return it == index_.end() ? nullptr : &entries_[it->second];
    }

private:
    std::vector<LedgerEntry> entries_;
    std::map<std::string, std::size_t> index_;
};

/** Criteria and ledger loaded together. */
struct Obstructions {
    CriteriaTable criteria;
    EliminationLedger ledger;

    explicit Obstructions(const DataSources& d) : criteria(d.criteria), ledger(d.ledger) {}
};

inline const Obstructions& default_obstructions() {
    static const Obstructions o(embedded_data());
    return o;
}

inline std::vector<CriterionHit> scan_criteria(const PlpInstance& inst) {
    return scan_criteria(inst, default_obstructions().criteria);
}

inline std::optional<LedgerEntry> elimination_ledger(const PlpInstance& inst) {
    const auto* e = default_obstructions().ledger.find(canonical_key(inst));
    if (!e) return std::nullopt;
    return *e;
}

/**
 * Criteria first, then the Jacobian rank test, then the ledger.  The
 * criterion reported is the first hit in scan order.
 */
inline Certificate classify(const PlpInstance& inst, const CertifyOptions& opt, const Obstructions& ob) {
    const auto key = canonical_key(inst);
    const auto hits = scan_criteria(inst, ob.criteria);
    if (!hits.empty()) {
        Certificate c;
        c.key = key.hex();
        c.verdict = Verdict::NonMinimal;
        c.dim = build_chart(inst).domain_size();
        c.seed = instance_seed(opt.seed, key);
        c.evidence_kind = "criterion";
        c.evidence = hits.front().id;
        return c;
    }
    Certificate c = certify(inst, opt);
    if (c.verdict == Verdict::Minimal) return c;
    if (const auto* e = ob.ledger.find(key)) {
        c.verdict = Verdict::NonMinimal;
        c.evidence_kind = "ledger";
        c.evidence = e->id;
    }
    return c;
}

inline Certificate classify(const PlpInstance& inst, const CertifyOptions& opt = {}) {
    return classify(inst, opt, default_obstructions());
}

}  // namespace plp
