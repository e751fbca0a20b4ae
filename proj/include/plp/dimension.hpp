#pragma once

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "incidence.hpp"

namespace plp {

struct DimensionBudget {
    int dimX = 0;
    int dimY = 0;
    int dimDomain = 0;
    int dimCodomain = 0;
};

inline int dim_x(const PlpSignature& s) { return 3 * s.pf + s.pd + 4 * s.lf + 2 * s.la; }
inline int dim_y(const PlpSignature& s) { return 2 * s.pf + s.pd + 2 * s.lf + s.la; }

inline DimensionBudget budget(const PlpSignature& s) {
    if (s.m < 2) throw std::invalid_argument("budget needs m >= 2");
    DimensionBudget b;
    b.dimX = dim_x(s);
    b.dimY = dim_y(s);
    b.dimDomain = 11 * s.m + b.dimX - 15;
    b.dimCodomain = s.m * b.dimY;
    return b;
}

inline bool is_balanced(const PlpSignature& s) {
    if (s.m < 2) throw std::invalid_argument("is_balanced needs m >= 2");
    const int m = s.m;
    return 11 * m - 15 == (2 * m - 3) * s.pf + (m - 1) * s.pd + 2 * (m - 2) * s.lf + (m - 2) * s.la;
}

/** Counting constraints used by the search: dependents need two free points, adjacent lines need a point. */
inline bool admissible_counts(const PlpSignature& s) {
    if (s.pf < 0 || s.pd < 0 || s.lf < 0 || s.la < 0) return false;
    if (s.pd >= 1 && s.pf < 2) return false;
    if (s.la >= 1 && s.pf < 1) return false;
    return true;
}

/** A balanced class that is not a finite list of signatures. */
struct FamilyDescriptor {
    std::string name;
    int m_min = 2, m_max = -1;  // m_max < 0: unbounded
    // For m-independent families the fixed counts; unused for the m=2 rule.
    int pf = 0, pd = 0, lf = 0, la = 0;
    bool any_lines = false;  // m=2: pf + pd = 7, lines unrestricted

    bool contains(const PlpSignature& s) const {
        if (s.m < m_min || (m_max >= 0 && s.m > m_max)) return false;
        if (any_lines) return s.pf + s.pd == 7 && admissible_counts(s);
        return s.pf == pf && s.pd == pd && s.lf == lf && s.la == la;
    }
};

inline std::vector<FamilyDescriptor> infinite_families() {
    return {
        {"seven points, any m", 3, -1, 4, 3, 0, 0, false},
        {"seven points, any m", 3, -1, 3, 4, 0, 1, false},
        {"seven points, any m", 3, -1, 2, 5, 1, 0, false},
        {"seven points, any m", 3, -1, 2, 5, 0, 2, false},
    };
}

inline FamilyDescriptor two_view_family() {
    FamilyDescriptor f;
    f.name = "two views: seven points, any lines";
    f.m_min = f.m_max = 2;
    f.any_lines = true;
    return f;
}

struct BalancedEnumeration {
    std::vector<PlpSignature> signatures;  // sorted lexicographically
    std::vector<FamilyDescriptor> families;
};

/**
 * Finite balanced classes for m in [m_min, m_max].  At most 6 points are
 * kept: 7 points force the m-independent families and 8 points only occur
 * as the 8-collinear configuration at m = 3, which is kept as listed.
 */
inline BalancedEnumeration enumerate_balanced(int m_min, int m_max) {
    if (m_min < 2 || m_min > m_max) throw std::invalid_argument("invalid m range");
    BalancedEnumeration out;
    for (int m = m_min; m <= m_max; ++m) {
        if (m == 2) {
            out.families.push_back(two_view_family());
            continue;
        }
        for (int pf = 0; pf <= 8; ++pf)
            for (int pd = 0; pd <= 8; ++pd)
                for (int lf = 0; lf <= 20; ++lf)
                    for (int la = 0; la <= 20; ++la) {
                        const PlpSignature s{m, pf, pd, lf, la};
                        if (!admissible_counts(s) || !is_balanced(s)) continue;
                        const bool special = m == 3 && pf == 2 && pd == 6 && lf == 0 && la == 0;
                        if (pf + pd > 6 && !special) continue;
                        out.signatures.push_back(s);
                    }
    }
    if (m_max >= 3)
        for (const auto& f : infinite_families()) out.families.push_back(f);
    std::sort(out.signatures.begin(), out.signatures.end());
    return out;
}

/** Single-view signatures (1, pf, 0, lf, la) with pf + 2 lf + la = 4. */
inline std::vector<PlpSignature> single_view_balanced() {
    std::vector<PlpSignature> out;
    for (int pf = 0; pf <= 4; ++pf)
        for (int lf = 0; 2 * lf <= 4; ++lf)
            for (int la = 0; la <= 4; ++la) {
                if (pf + 2 * lf + la != 4) continue;
                if (la >= 1 && pf < 1) continue;
                out.push_back({1, pf, 0, lf, la});
            }
    std::sort(out.begin(), out.end());
    return out;
}

/** Dependent points can be added to a single-view problem without changing its type. */
inline bool single_view_dependents_free_to_add(const PlpSignature& s) { return s.m == 1 && s.pf >= 2; }

inline void write_csv(std::ostream& os, const std::vector<PlpSignature>& sigs) {
    os << "m,pf,pd,lf,la\n";
    for (const auto& s : sigs) os << s.m << ',' << s.pf << ',' << s.pd << ',' << s.lf << ',' << s.la << '\n';
}

}  // namespace plp
