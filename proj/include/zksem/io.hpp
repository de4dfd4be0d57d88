#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zksem/solver.hpp"

namespace zksem {

using json = nlohmann::json;

// ---------------------------------------------------------------- SEM2 snapshots

struct Snapshot {
    Field field;
    double t = 0;
};

namespace detail {

inline void put_u32(std::string& s, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}
inline void put_u64(std::string& s, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}
inline void put_f64(std::string& s, double v) { put_u64(s, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_le(const std::string& s, std::size_t pos, int bytes)
{
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t(std::uint8_t(s[pos + std::size_t(i)])) << (8 * i);
    return v;
}

} // namespace detail

constexpr std::size_t snapshot_header_bytes = 4 + 4 + 16 + 24;

inline std::string encode_snapshot(const Field& f, double t)
{
    std::string s = "SEM2";
    detail::put_u32(s, 1);
    detail::put_u64(s, f.grid.nx);
    detail::put_u64(s, f.grid.ny);
    detail::put_f64(s, f.grid.Lx);
    detail::put_f64(s, f.grid.Ly);
    detail::put_f64(s, t);
    s.reserve(s.size() + 8 * f.data.size());
    for (double v : f.data) detail::put_f64(s, v);
    return s;
}

inline Snapshot decode_snapshot(const std::string& s)
{
    require(s.size() >= 4 && s.compare(0, 4, "SEM2") == 0, "bad magic");
    require(s.size() >= 8, "truncated header");
    require(detail::get_le(s, 4, 4) == 1, "unsupported version");
    require(s.size() >= snapshot_header_bytes, "truncated header");
    const std::uint64_t nx = detail::get_le(s, 8, 8), ny = detail::get_le(s, 16, 8);
    require(nx <= (1u << 20) && ny <= (1u << 20), "grid dimensions out of range");
    const double Lx = std::bit_cast<double>(detail::get_le(s, 24, 8));
    const double Ly = std::bit_cast<double>(detail::get_le(s, 32, 8));
    const double t = std::bit_cast<double>(detail::get_le(s, 40, 8));
    const std::size_t expect = snapshot_header_bytes + 8 * std::size_t(nx) * std::size_t(ny);
    require(s.size() >= expect, "truncated payload");
    require(s.size() == expect, "trailing bytes after payload");
    Snapshot snap{Field(make_grid(nx, ny, Lx, Ly)), t};
    for (std::size_t i = 0; i < snap.field.data.size(); ++i)
        snap.field.data[i] = std::bit_cast<double>(detail::get_le(s, snapshot_header_bytes + 8 * i, 8));
    return snap;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    require(bool(in), "cannot open " + path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void write_file(const std::string& path, const std::string& bytes)
{
    std::ofstream out(path, std::ios::binary);
    require(bool(out), "cannot write " + path);
    out.write(bytes.data(), std::streamsize(bytes.size()));
    require(bool(out), "cannot write " + path);
}

inline void write_snapshot(const std::string& path, const Field& f, double t) { write_file(path, encode_snapshot(f, t)); }
inline Snapshot read_snapshot(const std::string& path) { return decode_snapshot(read_file(path)); }

// ---------------------------------------------------------------- configs

// typed access to a JSON object that remembers which keys were used, so leftovers can be rejected
class ConfigReader {
public:
    ConfigReader(const json& j, std::string where) : j_(j), where_(std::move(where))
    {
        require(j_.is_object(), where_ + " must be a JSON object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    template <class T>
    T get(const std::string& key)
    {
        require(has(key), "missing key " + path(key));
        return convert<T>(key);
    }

    template <class T>
    T get(const std::string& key, const T& fallback)
    {
        return has(key) ? convert<T>(key) : (used_.insert(key), fallback);
    }

    ConfigReader child(const std::string& key)
    {
        require(has(key), "missing key " + path(key));
        used_.insert(key);
        return ConfigReader(j_.at(key), path(key));
    }

    const json& raw(const std::string& key)
    {
        require(has(key), "missing key " + path(key));
        used_.insert(key);
        return j_.at(key);
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            require(used_.count(it.key()) > 0, "unknown key " + path(it.key()));
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> used_;

    std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

    template <class T>
    T convert(const std::string& key)
    {
        used_.insert(key);
        const json& v = j_.at(key);
        try {
            if constexpr (std::is_same_v<T, double>) require(v.is_number(), "expected a number");
            if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
                require(v.is_number_integer(), "expected an integer");
                if constexpr (std::is_unsigned_v<T>) require(v.get<long long>() >= 0, "expected a non-negative integer");
            }
            if constexpr (std::is_same_v<T, bool>) require(v.is_boolean(), "expected a boolean");
            if constexpr (std::is_same_v<T, std::string>) require(v.is_string(), "expected a string");
            return v.get<T>();
        } catch (const ValidationError& e) {
            throw ValidationError(std::string(e.what()) + " at " + path(key));
        } catch (const json::exception&) {
            throw ValidationError("wrong type at " + path(key));
        }
    }
};

inline json load_json(const std::string& path)
{
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("config parse error at byte " + std::to_string(e.byte));
    }
}

inline Grid2D read_grid(ConfigReader r)
{
    const auto nx = r.get<std::size_t>("nx"), ny = r.get<std::size_t>("ny");
    const double Lx = r.get<double>("Lx"), Ly = r.get<double>("Ly");
    r.finish();
    return make_grid(nx, ny, Lx, Ly);
}

inline std::pair<double, double> read_pair(const json& v, const std::string& what)
{
    require(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(), what + " must be [a, b]");
    return {v[0].get<double>(), v[1].get<double>()};
}

// gaussian, line_soliton or snapshot
inline Field read_initial(ConfigReader r, const Grid2D& g)
{
    const auto family = r.get<std::string>("family");
    Field f;
    if (family == "gaussian") {
        const double a = r.get<double>("amplitude");
        const auto [wx, wy] = read_pair(r.raw("widths"), "widths");
        const auto [x0, y0] = r.has("center") ? read_pair(r.raw("center"), "center") : std::pair{0.0, 0.0};
        require(wx > 0 && wy > 0, "gaussian widths must be positive");
        f = Field::sample(g, [&](double x, double y) {
            return a * std::exp(-0.5 * (std::pow((x - x0) / wx, 2) + std::pow((y - y0) / wy, 2)));
        });
    } else if (family == "line_soliton") {
        const double c = r.get<double>("c");
        const double x0 = r.get<double>("x0", 0.0);
        const bool zero_mean = r.get<bool>("zero_mean", false);
        require(c > 0, "soliton speed must be positive");
        f = Field::sample(g, [&](double x, double) { return kdv_soliton_periodic(x, c, x0, g.Lx); });
        if (zero_mean) {
            const double m = mean(f);
            for (double& v : f.data) v -= m;
        }
    } else if (family == "snapshot") {
        f = read_snapshot(r.get<std::string>("path")).field;
        require(f.grid == g, "snapshot grid does not match config grid");
    } else {
        throw ValidationError("unknown initial-data family " + family);
    }
    r.finish();
    return f;
}

// ---------------------------------------------------------------- reports

inline void write_json(const std::string& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows)
{
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
    write_file(path, os.str());
}

// JSON cannot hold inf or nan; they are written as strings
inline json number(double v)
{
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

} // namespace zksem
