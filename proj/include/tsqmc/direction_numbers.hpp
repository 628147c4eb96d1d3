#pragma once

// Sobol' direction numbers in the Joe-Kuo text layout:
//
//     d  s  a  m_1 ... m_s
//
// one line per dimension d >= 2. Dimension 1 is the van der Corput sequence
// and has no line. Lines that do not start with an integer (such as the
// usual "d s a m_i" header) are skipped.

#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "tsqmc/errors.hpp"
#include "tsqmc/joe_kuo_1024.hpp"

namespace tsqmc {

/// Output precision of Sobol' points and of the linear scrambling.
inline constexpr unsigned kSobolBits = 32;

struct DirectionRecord {
    std::size_t dimension = 0;
    unsigned degree = 0;
    std::uint32_t coefficients = 0;  // a: interior coefficients of the primitive polynomial
    std::vector<std::uint32_t> initial;  // m_1..m_s
};

class DirectionNumberTable {
public:
    DirectionNumberTable() = default;

    static DirectionNumberTable parse(std::istream& in) {
        DirectionNumberTable table;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::istringstream ls(line);
            long long dim = 0;
            if (!(ls >> dim)) continue;
            DirectionRecord rec;
            long long s = 0, a = 0;
            if (!(ls >> s >> a) || s < 1 || s > 31 || a < 0)
                throw InvalidArgument("direction numbers: malformed line " + std::to_string(line_no));
            rec.dimension = static_cast<std::size_t>(dim);
            rec.degree = static_cast<unsigned>(s);
            rec.coefficients = static_cast<std::uint32_t>(a);
            for (long long i = 1; i <= s; ++i) {
                long long m = 0;
                if (!(ls >> m)) throw InvalidArgument("direction numbers: missing m_i on line " + std::to_string(line_no));
                if (m <= 0 || m % 2 == 0 || m >= (1LL << i))
                    throw InvalidArgument("direction numbers: m_" + std::to_string(i) + " must be odd and below 2^" +
                                          std::to_string(i) + " (line " + std::to_string(line_no) + ")");
                rec.initial.push_back(static_cast<std::uint32_t>(m));
            }
            if (rec.dimension != table.records_.size() + 2)
                throw InvalidArgument("direction numbers: dimensions must be consecutive from 2 (line " +
                                      std::to_string(line_no) + ")");
            table.records_.push_back(std::move(rec));
        }
        return table;
    }

    static DirectionNumberTable load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InvalidArgument("direction numbers: cannot open " + path);
        return parse(in);
    }

    /// The bundled Joe-Kuo table, dimensions 1..1024.
    static const DirectionNumberTable& bundled() {
        static const DirectionNumberTable table = [] {
            std::istringstream in(detail::kJoeKuo1024);
            return parse(in);
        }();
        return table;
    }

    /// Largest supported dimension (records cover 2.., dimension 1 is implicit).
    [[nodiscard]] std::size_t max_dimension() const noexcept { return records_.size() + 1; }

    [[nodiscard]] const std::vector<DirectionRecord>& records() const noexcept { return records_; }

    /// Direction numbers v_1..v_32 of 0-based coordinate `coord`, scaled so
    /// that v_k = m_k * 2^(32-k).
    [[nodiscard]] std::array<std::uint32_t, kSobolBits> direction_numbers(std::size_t coord) const {
        if (coord >= max_dimension())
            throw InvalidArgument("Sobol': dimension " + std::to_string(coord + 1) + " exceeds table size " +
                                  std::to_string(max_dimension()));
        std::array<std::uint32_t, kSobolBits> v{};
        if (coord == 0) {
            for (unsigned k = 1; k <= kSobolBits; ++k) v[k - 1] = 1u << (kSobolBits - k);
            return v;
        }
        const auto& rec = records_[coord - 1];
        const unsigned s = rec.degree;
        std::vector<std::uint64_t> m(kSobolBits + 1, 0);
        for (unsigned k = 1; k <= s && k <= kSobolBits; ++k) m[k] = rec.initial[k - 1];
        for (unsigned k = s + 1; k <= kSobolBits; ++k) {
            std::uint64_t mk = (m[k - s] << s) ^ m[k - s];
            for (unsigned i = 1; i < s; ++i)
                if ((rec.coefficients >> (s - 1 - i)) & 1u) mk ^= m[k - i] << i;
            m[k] = mk;
        }
        for (unsigned k = 1; k <= kSobolBits; ++k)
            v[k - 1] = static_cast<std::uint32_t>(m[k] << (kSobolBits - k));
        return v;
    }

private:
    std::vector<DirectionRecord> records_;
};

} // namespace tsqmc
