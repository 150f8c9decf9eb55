#pragma once

#include "errors.hpp"
#include "position.hpp"
#include "relaxed_split.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

namespace cryptosplit {

enum class UpdateKind : std::uint8_t {
    split = 0,
    scale = 1,    // s(D) <- s(lambda D) / lambda
    scale_up = 2, // s(D) <- lambda s(D / lambda), experimental upward direction
};

/// One improvement of a position's value.
///
/// Update steps are numbered as in the search loop: step 2r-1 is the
/// splitting pass of round r and step 2r its scaling pass; step 0 is the
/// zero-bit initialisation, which has no record. `seq` orders updates
/// globally, including several updates within the same step.
template <class V>
struct UpdateRecord {
    std::uint32_t step = 0;
    std::uint32_t seq = 0;
    UpdateKind kind = UpdateKind::split;
    SplitChoice choice{};       // kind == split
    std::uint8_t factor = 0;    // kind == scale / scale_up
    V value{};
};

enum class NumericMode : std::uint8_t { floating = 0, rational = 1 };

template <class V>
constexpr NumericMode numeric_mode_of()
{
    return std::is_same_v<V, Rational> ? NumericMode::rational : NumericMode::floating;
}

inline std::string to_string(NumericMode m) { return m == NumericMode::rational ? "rational" : "float"; }

template <class V>
V value_from_int(long v)
{
    if constexpr (std::is_same_v<V, Rational>)
        return Rational(v);
    else
        return V(v);
}

template <class V>
double value_to_double(V const& v)
{
    if constexpr (std::is_same_v<V, Rational>)
        return v.get_d();
    else
        return double(v);
}

/// Bytes needed for the dense index and per-position storage at resolution T,
/// excluding provenance history.
inline std::uint64_t estimate_table_bytes(int resolution)
{
    std::uint64_t const side = std::uint64_t(resolution) + 1;
    std::uint64_t const dense = side * side * side * side;
    std::uint64_t const canon = dense / 4 + side * side;
    return dense * sizeof(std::int32_t) + canon * (sizeof(Lattice) + 8 + sizeof(std::vector<int>) + 64);
}

inline constexpr std::uint64_t default_memory_budget = std::uint64_t(4) << 30;

/// Lower bounds s(D) on the game value of every canonical position in
/// {0..T}^4, together with the full history of improvements.
template <class V>
class ValueTable {
public:
    using value_type = V;
    using Record = UpdateRecord<V>;

    ValueTable() = default;

    explicit ValueTable(int resolution, std::uint64_t memory_budget = default_memory_budget)
        : resolution_(resolution), side_(resolution + 1)
    {
        if (resolution < 0 || resolution > 255)
            throw UsageError("resolution T must lie in [0, 255], got " + std::to_string(resolution));
        auto const need = estimate_table_bytes(resolution);
        if (need > memory_budget)
            throw ResourceError("table at T=" + std::to_string(resolution) + " needs about " +
                                std::to_string(need >> 20) + " MiB, budget is " +
                                std::to_string(memory_budget >> 20) + " MiB");
        std::size_t const dense = std::size_t(side_) * side_ * side_ * side_;
        slot_of_.assign(dense, -1);
        for (int a = 0; a <= resolution; ++a)
            for (int b = 0; b <= resolution; ++b)
                for (int c = 0; c <= resolution; ++c)
                    for (int d = 0; d <= resolution; ++d) {
                        Lattice p{{a, b, c, d}};
                        if (is_canonical(p))
                            positions_.push_back(p);
                    }
        std::stable_sort(positions_.begin(), positions_.end(),
                         [](Lattice const& l, Lattice const& r) { return l.norm1() < r.norm1(); });
        for (std::size_t s = 0; s < positions_.size(); ++s)
            for (auto g : all_symmetries)
                slot_of_[dense_index(apply(g, positions_[s]))] = std::int32_t(s);
        values_.reserve(positions_.size());
        for (auto const& p : positions_)
            values_.push_back(value_from_int<V>(succ_zero(p)));
        history_.resize(positions_.size());
    }

    int resolution() const { return resolution_; }
    std::size_t size() const { return positions_.size(); }

    /// Canonical positions in ascending L1 norm.
    std::vector<Lattice> const& positions() const { return positions_; }
    Lattice const& position(std::size_t slot) const { return positions_[slot]; }

    bool in_range(Lattice const& p) const
    {
        return std::all_of(p.e.begin(), p.e.end(), [&](int x) { return x >= 0 && x <= resolution_; });
    }

    std::size_t dense_index(Lattice const& p) const
    {
        return ((std::size_t(p[0]) * side_ + p[1]) * side_ + p[2]) * side_ + p[3];
    }
    std::size_t dense_size() const { return slot_of_.size(); }

    /// Slot of any (not necessarily canonical) in-range position.
    std::size_t slot(Lattice const& p) const
    {
        if (!in_range(p))
            throw UsageError("position " + format_position(p) + " outside {0.." + std::to_string(resolution_) +
                             "}^4");
        return std::size_t(slot_of_[dense_index(p)]);
    }
    std::int32_t slot_at_dense(std::size_t idx) const { return slot_of_[idx]; }

    V const& value(std::size_t slot) const { return values_[slot]; }
    V const& value(Lattice const& p) const { return values_[slot(p)]; }
    std::vector<V> const& values() const { return values_; }

    std::vector<Record> const& history(std::size_t slot) const { return history_[slot]; }

    /// Completed update steps (0 right after initialisation).
    std::uint32_t steps() const { return steps_; }
    std::uint32_t rounds() const { return steps_ / 2; }
    std::uint32_t next_seq() const { return next_seq_; }

    /// Last step <= i in which the slot improved, or 0.
    std::uint32_t last_update(std::size_t slot, std::uint32_t i) const
    {
        auto const* rec = record_at(slot, i);
        return rec ? rec->step : 0;
    }

    /// Latest record with step <= i, or nullptr for the zero-bit initialisation.
    Record const* record_at(std::size_t slot, std::uint32_t i) const
    {
        auto const& h = history_[slot];
        auto it = std::upper_bound(h.begin(), h.end(), i, [](std::uint32_t s, Record const& r) { return s < r.step; });
        return it == h.begin() ? nullptr : &*(it - 1);
    }

    /// Value of the slot as it stood just before global update `seq`.
    V value_before(std::size_t slot, std::uint32_t seq) const
    {
        auto const& h = history_[slot];
        auto it = std::lower_bound(h.begin(), h.end(), seq, [](Record const& r, std::uint32_t s) { return r.seq < s; });
        if (it == h.begin())
            return value_from_int<V>(succ_zero(positions_[slot]));
        return (it - 1)->value;
    }

    // --- mutation (used by the search engine and the loader) ---

    void begin_step() { ++steps_; }

    void update(std::size_t slot, Record rec)
    {
        rec.step = steps_;
        rec.seq = next_seq_++;
        values_[slot] = rec.value;
        history_[slot].push_back(std::move(rec));
    }

    /// Restores a table from persisted state; records must carry step and seq.
    void restore(std::uint32_t steps, std::uint32_t next_seq, std::vector<V> values,
                 std::vector<std::vector<Record>> history)
    {
        if (values.size() != positions_.size() || history.size() != positions_.size())
            throw FormatError("table payload does not match resolution");
        steps_ = steps;
        next_seq_ = next_seq;
        values_ = std::move(values);
        history_ = std::move(history);
    }

    std::size_t record_count() const
    {
        std::size_t n = 0;
        for (auto const& h : history_)
            n += h.size();
        return n;
    }

private:
    int resolution_ = 0;
    int side_ = 1;
    std::vector<Lattice> positions_;
    std::vector<std::int32_t> slot_of_;
    std::vector<V> values_;
    std::vector<std::vector<Record>> history_;
    std::uint32_t steps_ = 0;
    std::uint32_t next_seq_ = 1;
};

} // namespace cryptosplit
