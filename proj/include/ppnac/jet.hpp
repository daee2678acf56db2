#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>

namespace ppnac {

// Truncated Taylor expansion of a time signal: value plus the first `order`
// time derivatives. Coefficients are stored normalized (c_k = f^(k) / k!) so
// products and quotients are plain Cauchy convolutions; callers read and write
// derivatives through from_derivatives()/derivative().
template <typename T, std::size_t Capacity = 8>
class Jet {
public:
    static constexpr std::size_t kCapacity = Capacity;

    Jet() = default;

    explicit Jet(std::size_t order, T value = T{}) : size_(check(order + 1)) {
        c_.fill(T{});
        c_[0] = value;
    }

    [[nodiscard]] static Jet constant(std::size_t order, T value) { return Jet(order, value); }

    // The independent variable t around t0: t0 + 1 * dt.
    [[nodiscard]] static Jet variable(std::size_t order, T t0) {
        Jet j(order, t0);
        if (order >= 1) j.c_[1] = T{1};
        return j;
    }

    [[nodiscard]] static Jet from_derivatives(std::span<const T> derivs) {
        if (derivs.empty()) throw std::invalid_argument("Jet: need at least the value");
        Jet j(derivs.size() - 1);
        T fact{1};
        for (std::size_t k = 0; k < derivs.size(); ++k) {
            if (k > 0) fact *= static_cast<T>(k);
            j.c_[k] = derivs[k] / fact;
        }
        return j;
    }

    [[nodiscard]] static Jet from_derivatives(std::initializer_list<T> derivs) {
        return from_derivatives(std::span<const T>(derivs.begin(), derivs.size()));
    }

    [[nodiscard]] std::size_t order() const noexcept { return size_ - 1; }
    [[nodiscard]] T value() const noexcept { return c_[0]; }

    [[nodiscard]] T derivative(std::size_t k) const {
        if (k >= size_) throw std::out_of_range("Jet: derivative beyond truncation order");
        T fact{1};
        for (std::size_t i = 2; i <= k; ++i) fact *= static_cast<T>(i);
        return c_[k] * fact;
    }

    [[nodiscard]] T taylor(std::size_t k) const { return c_.at(k); }
    T& taylor(std::size_t k) { return c_.at(k); }

    Jet& operator+=(const Jet& o) {
        same_order(o);
        for (std::size_t k = 0; k < size_; ++k) c_[k] += o.c_[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        same_order(o);
        for (std::size_t k = 0; k < size_; ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Jet& operator*=(T s) {
        for (std::size_t k = 0; k < size_; ++k) c_[k] *= s;
        return *this;
    }
    Jet& operator+=(T s) {
        c_[0] += s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, T s) { return a += s; }
    friend Jet operator+(T s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, T s) { return a += -s; }
    friend Jet operator-(T s, const Jet& a) { return (-a) + s; }
    friend Jet operator*(Jet a, T s) { return a *= s; }
    friend Jet operator*(T s, Jet a) { return a *= s; }
    friend Jet operator-(Jet a) { return a *= T{-1}; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        a.same_order(b);
        Jet out(a.order());
        for (std::size_t k = 0; k < a.size_; ++k) {
            T acc{};
            for (std::size_t i = 0; i <= k; ++i) acc += a.c_[i] * b.c_[k - i];
            out.c_[k] = acc;
        }
        return out;
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        a.same_order(b);
        if (b.c_[0] == T{}) throw std::domain_error("Jet: division by a jet with zero value");
        Jet out(a.order());
        for (std::size_t k = 0; k < a.size_; ++k) {
            T acc = a.c_[k];
            for (std::size_t i = 1; i <= k; ++i) acc -= b.c_[i] * out.c_[k - i];
            out.c_[k] = acc / b.c_[0];
        }
        return out;
    }

    friend Jet log(const Jet& a) {
        using std::log;
        if (!(a.c_[0] > T{})) throw std::domain_error("Jet: log of a nonpositive value");
        Jet out(a.order());
        out.c_[0] = log(a.c_[0]);
        for (std::size_t k = 1; k < a.size_; ++k) {
            T acc = a.c_[k];
            for (std::size_t i = 1; i < k; ++i) acc -= static_cast<T>(i) * out.c_[i] * a.c_[k - i] / static_cast<T>(k);
            out.c_[k] = acc / a.c_[0];
        }
        return out;
    }

    friend Jet exp(const Jet& a) {
        using std::exp;
        Jet out(a.order());
        out.c_[0] = exp(a.c_[0]);
        for (std::size_t k = 1; k < a.size_; ++k) {
            T acc{};
            for (std::size_t i = 1; i <= k; ++i) acc += static_cast<T>(i) * a.c_[i] * out.c_[k - i];
            out.c_[k] = acc / static_cast<T>(k);
        }
        return out;
    }

private:
    static std::size_t check(std::size_t n) {
        if (n > Capacity) throw std::length_error("Jet: order exceeds capacity");
        return n;
    }
    void same_order(const Jet& o) const {
        if (o.size_ != size_) throw std::invalid_argument("Jet: mismatched truncation orders");
    }

    std::array<T, Capacity> c_{};
    std::size_t size_ = 1;
};

using JetD = Jet<double>;

}  // namespace ppnac
