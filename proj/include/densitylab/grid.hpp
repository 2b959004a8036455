#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "densitylab/errors.hpp"

namespace densitylab {

/// Strictly increasing, positive, finite sample abscissae.
class Grid {
public:
    Grid() = default;

    explicit Grid(std::vector<double> samples) : s_(std::move(samples))
    {
        if (s_.empty()) throw DomainError("grid: no samples");
        for (std::size_t i = 0; i < s_.size(); ++i) {
            if (!std::isfinite(s_[i]) || s_[i] <= 0.0)
                throw DomainError("grid: samples must be finite and positive");
            if (i > 0 && !(s_[i] > s_[i - 1]))
                throw DomainError("grid: samples must be strictly increasing");
        }
    }

    [[nodiscard]] static Grid linspace(double a, double b, std::size_t n)
    {
        if (n == 0) throw DomainError("grid: n must be positive");
        if (n == 1) return Grid({a});
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
        v.back() = b;
        return Grid(std::move(v));
    }

    [[nodiscard]] static Grid logspace(double a, double b, std::size_t n)
    {
        if (!(a > 0.0) || !(b > 0.0)) throw DomainError("grid: logspace needs positive ends");
        if (n == 0) throw DomainError("grid: n must be positive");
        if (n == 1) return Grid({a});
        const double la = std::log(a), lb = std::log(b);
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
        v.front() = a;
        v.back() = b;
        return Grid(std::move(v));
    }

    /// "a:b:n" (uniform) or "log:a:b:n" (geometric).
    [[nodiscard]] static Grid parse(std::string_view text)
    {
        bool log = false;
        if (text.starts_with("log:")) {
            log = true;
            text.remove_prefix(4);
        }
        std::vector<std::string> parts;
        std::string cur;
        for (char c : text) {
            if (c == ':') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        parts.push_back(cur);
        if (parts.size() != 3) throw ConfigError("grid spec must be a:b:n or log:a:b:n, got '" + std::string(text) + "'");
        double a = 0, b = 0;
        long n = 0;
        try {
            std::size_t pos = 0;
            a = std::stod(parts[0], &pos);
            if (pos != parts[0].size()) throw std::invalid_argument("a");
            b = std::stod(parts[1], &pos);
            if (pos != parts[1].size()) throw std::invalid_argument("b");
            n = std::stol(parts[2], &pos);
            if (pos != parts[2].size()) throw std::invalid_argument("n");
        } catch (const std::exception&) {
            throw ConfigError("grid spec has a non-numeric field: '" + std::string(text) + "'");
        }
        if (n < 1) throw ConfigError("grid spec needs n >= 1");
        if (n > 1 && !(b > a)) throw ConfigError("grid spec needs b > a");
        try {
            return log ? logspace(a, b, static_cast<std::size_t>(n)) : linspace(a, b, static_cast<std::size_t>(n));
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    }

    [[nodiscard]] std::span<const double> samples() const noexcept { return s_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return s_; }
    [[nodiscard]] std::size_t size() const noexcept { return s_.size(); }
    [[nodiscard]] bool empty() const noexcept { return s_.empty(); }
    [[nodiscard]] double operator[](std::size_t i) const { return s_[i]; }
    [[nodiscard]] double front() const { return s_.front(); }
    [[nodiscard]] double back() const { return s_.back(); }
    [[nodiscard]] auto begin() const noexcept { return s_.begin(); }
    [[nodiscard]] auto end() const noexcept { return s_.end(); }

private:
    std::vector<double> s_;
};

} // namespace densitylab
