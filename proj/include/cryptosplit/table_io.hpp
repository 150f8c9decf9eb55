#pragma once

#include "value_table.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace cryptosplit {

// Binary table dump, little-endian:
//
//   "CGTABLE/1\n"
//   u32 T, u8 mode (0 float, 1 rational), u32 steps, u32 next_seq, u8 converged
//   u64 slot count
//   per slot in table order:
//     u8[4] position, value, u32 record count,
//     per record: u32 step, u32 seq, u8 kind, u8 variant, u8 a0, u8 b0,
//                 u8 partner0, u8 factor, value
//   value: f64 (float mode) or u32 length + "p/q" text (rational mode)

inline constexpr char table_magic[] = "CGTABLE/1\n";

namespace detail {

template <class U>
void put(std::ostream& os, U v)
{
    unsigned char buf[sizeof(U)];
    std::memcpy(buf, &v, sizeof(U));
    os.write(reinterpret_cast<char const*>(buf), sizeof(U));
}

template <class U>
U get(std::istream& is)
{
    unsigned char buf[sizeof(U)];
    if (!is.read(reinterpret_cast<char*>(buf), sizeof(U)))
        throw FormatError("truncated table file");
    U v;
    std::memcpy(&v, buf, sizeof(U));
    return v;
}

template <class V>
void put_value(std::ostream& os, V const& v)
{
    if constexpr (std::is_same_v<V, Rational>) {
        auto const s = to_fraction_string(v);
        put<std::uint32_t>(os, std::uint32_t(s.size()));
        os.write(s.data(), std::streamsize(s.size()));
    } else {
        put<double>(os, double(v));
    }
}

template <class V>
V get_value(std::istream& is)
{
    if constexpr (std::is_same_v<V, Rational>) {
        auto const n = get<std::uint32_t>(is);
        if (n > (1u << 24))
            throw FormatError("implausible rational length in table file");
        std::string s(n, '\0');
        if (!is.read(s.data(), n))
            throw FormatError("truncated table file");
        return parse_rational(s);
    } else {
        return V(get<double>(is));
    }
}

} // namespace detail

template <class V>
void save_table(std::ostream& os, ValueTable<V> const& t, bool converged)
{
    using namespace detail;
    os.write(table_magic, sizeof table_magic - 1);
    put<std::uint32_t>(os, std::uint32_t(t.resolution()));
    put<std::uint8_t>(os, std::uint8_t(numeric_mode_of<V>()));
    put<std::uint32_t>(os, t.steps());
    put<std::uint32_t>(os, t.next_seq());
    put<std::uint8_t>(os, converged ? 1 : 0);
    put<std::uint64_t>(os, t.size());
    for (std::size_t s = 0; s < t.size(); ++s) {
        for (int x : t.position(s).e)
            put<std::uint8_t>(os, std::uint8_t(x));
        put_value(os, t.value(s));
        auto const& h = t.history(s);
        put<std::uint32_t>(os, std::uint32_t(h.size()));
        for (auto const& r : h) {
            put<std::uint32_t>(os, r.step);
            put<std::uint32_t>(os, r.seq);
            put<std::uint8_t>(os, std::uint8_t(r.kind));
            put<std::uint8_t>(os, std::uint8_t(r.choice.variant));
            put<std::uint8_t>(os, r.choice.a0);
            put<std::uint8_t>(os, r.choice.b0);
            put<std::uint8_t>(os, r.choice.partner0);
            put<std::uint8_t>(os, r.factor);
            put_value(os, r.value);
        }
    }
    if (!os)
        throw FormatError("failed writing table");
}

struct TableHeader {
    int resolution = 0;
    NumericMode mode = NumericMode::floating;
    std::uint32_t steps = 0;
    std::uint32_t next_seq = 0;
    bool converged = false;
};

inline TableHeader read_table_header(std::istream& is)
{
    using namespace detail;
    char magic[sizeof table_magic - 1];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, table_magic, sizeof magic) != 0)
        throw FormatError("not a CGTABLE/1 file");
    TableHeader h;
    h.resolution = int(get<std::uint32_t>(is));
    auto const mode = get<std::uint8_t>(is);
    if (mode > 1)
        throw FormatError("unknown numeric mode in table file");
    h.mode = NumericMode(mode);
    h.steps = get<std::uint32_t>(is);
    h.next_seq = get<std::uint32_t>(is);
    h.converged = get<std::uint8_t>(is) != 0;
    return h;
}

/// Reads the payload following a header returned by read_table_header.
template <class V>
ValueTable<V> read_table_body(std::istream& is, TableHeader const& h)
{
    using namespace detail;
    if (h.mode != numeric_mode_of<V>())
        throw FormatError("table numeric mode is " + to_string(h.mode));
    ValueTable<V> t(h.resolution);
    auto const n = get<std::uint64_t>(is);
    if (n != t.size())
        throw FormatError("table slot count does not match resolution");
    std::vector<V> values(n);
    std::vector<std::vector<UpdateRecord<V>>> history(n);
    for (std::size_t s = 0; s < n; ++s) {
        Lattice p;
        for (int& x : p.e)
            x = get<std::uint8_t>(is);
        if (p != t.position(s))
            throw FormatError("table positions out of order at slot " + std::to_string(s));
        values[s] = get_value<V>(is);
        auto const m = get<std::uint32_t>(is);
        history[s].reserve(m);
        for (std::uint32_t i = 0; i < m; ++i) {
            UpdateRecord<V> r;
            r.step = get<std::uint32_t>(is);
            r.seq = get<std::uint32_t>(is);
            auto const kind = get<std::uint8_t>(is);
            if (kind > 2)
                throw FormatError("unknown update kind in table file");
            r.kind = UpdateKind(kind);
            auto const variant = get<std::uint8_t>(is);
            if (variant > 3)
                throw FormatError("unknown symmetry in table file");
            r.choice.variant = Symmetry(variant);
            r.choice.a0 = get<std::uint8_t>(is);
            r.choice.b0 = get<std::uint8_t>(is);
            r.choice.partner0 = get<std::uint8_t>(is);
            r.factor = get<std::uint8_t>(is);
            r.value = get_value<V>(is);
            if (i > 0 && (r.step < history[s].back().step || r.seq <= history[s].back().seq))
                throw FormatError("table history out of order at slot " + std::to_string(s));
            history[s].push_back(std::move(r));
        }
    }
    t.restore(h.steps, h.next_seq, std::move(values), std::move(history));
    return t;
}

template <class V>
void save_table_file(std::string const& path, ValueTable<V> const& t, bool converged)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw UsageError("cannot open " + path + " for writing");
    save_table(os, t, converged);
}

template <class V>
ValueTable<V> load_table_file(std::string const& path, TableHeader* header = nullptr)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw UsageError("cannot open " + path);
    auto const h = read_table_header(is);
    if (header)
        *header = h;
    return read_table_body<V>(is, h);
}

} // namespace cryptosplit
