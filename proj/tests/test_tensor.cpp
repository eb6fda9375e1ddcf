#include "deeptd/error.hpp"
#include "deeptd/random.hpp"
#include "deeptd/tensor.hpp"

#include <doctest.h>

#include <boost/random/uniform_int_distribution.hpp>

#include <cmath>
#include <vector>

using namespace deeptd;

namespace {

std::vector<double> gaussian(Rng& rng, std::size_t n)
{
    std::vector<double> v(n);
    fill_gaussian(rng, v);
    return v;
}

TensorShape random_shape(Rng& rng, std::size_t max_order, std::size_t max_dim)
{
    boost::random::uniform_int_distribution<std::size_t> order(1, max_order);
    boost::random::uniform_int_distribution<std::size_t> dim(1, max_dim);
    std::vector<std::size_t> dims(order(rng));
    for (auto& d : dims)
        d = dim(rng);
    return TensorShape(dims);
}

} // namespace

TEST_CASE("shape validation")
{
    CHECK_THROWS_AS(TensorShape(std::vector<std::size_t>{}), ArgumentError);
    CHECK_THROWS_AS(TensorShape({2, 0}), ArgumentError);
    const TensorShape s({2, 3, 4});
    CHECK(s.order() == 3);
    CHECK(s.total() == 24);
    const std::vector<std::size_t> too_big{2, 0, 0};
    CHECK_THROWS(s.linear_index(too_big));
    const std::vector<std::size_t> wrong_len{0, 0};
    CHECK_THROWS_AS(s.linear_index(wrong_len), DimensionError);
}

TEST_CASE("tensorize uses mixed-radix digits with the first mode fastest")
{
    // x = (a, b, c, d) on a 2x2 grid.
    const std::vector<double> x{1.5, -2.0, 7.0, 0.25};
    const auto t = tensorize(x, TensorShape({2, 2}));
    CHECK(t.at({0, 0}) == 1.5);
    CHECK(t.at({1, 0}) == -2.0);
    CHECK(t.at({0, 1}) == 7.0);
    CHECK(t.at({1, 1}) == 0.25);

    const std::vector<double> e1{1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
    const auto u = tensorize(e1, TensorShape({3, 2, 2}));
    CHECK(u.at({0, 0, 0}) == 1.0);
    CHECK(frobenius_norm(u) == 1.0);

    CHECK_THROWS_AS(tensorize(x, TensorShape({2, 3})), DimensionError);
}

TEST_CASE("tensorize matches the digit map exhaustively")
{
    // Independent oracle: coordinate i has digits i_l = floor(i / prod_{m<l} d_m) mod d_l.
    for (const auto& dims : std::vector<std::vector<std::size_t>>{
             {4}, {2, 2}, {3, 5}, {2, 3, 4}, {4, 4, 4, 4}, {2, 2, 2, 2, 2, 2, 2, 2}, {1, 7, 1, 3}}) {
        const TensorShape shape(dims);
        std::vector<double> x(shape.total());
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = static_cast<double>(i);
        const auto t = tensorize(x, shape);
        for (std::size_t i = 0; i < x.size(); ++i) {
            std::vector<std::size_t> digits;
            std::size_t stride = 1;
            for (std::size_t d : dims) {
                digits.push_back((i / stride) % d);
                stride *= d;
            }
            REQUIRE(t.at(digits) == x[i]);
            REQUIRE(shape.multi_index(i) == digits);
            REQUIRE(shape.linear_index(digits) == i);
        }
        CHECK(vectorize(t) == x);
    }
}

TEST_CASE("vectorize examples")
{
    CHECK(vectorize(tensorize(std::vector<double>{1, 2, 3, 4}, TensorShape({2, 2}))) == std::vector<double>{1, 2, 3, 4});
    CHECK(vectorize(DenseTensor(TensorShape({3, 2}))) == std::vector<double>(6, 0.0));
    DenseTensor t(TensorShape({2, 2}));
    const std::vector<std::size_t> idx{1, 0};
    t.at(idx) = 1.0;
    CHECK(vectorize(t) == std::vector<double>{0, 1, 0, 0});
}

TEST_CASE("outer product")
{
    const std::vector<std::vector<double>> e{{1, 0}, {1, 0}};
    CHECK(vectorize(outer_product(e)) == std::vector<double>{1, 0, 0, 0});

    const std::vector<std::vector<double>> f{{1, 2}, {3, 4}};
    const auto t = outer_product(f);
    CHECK(t.at({0, 0}) == 3.0);
    CHECK(t.at({1, 0}) == 6.0);
    CHECK(t.at({0, 1}) == 4.0);
    CHECK(t.at({1, 1}) == 8.0);

    CHECK_THROWS_AS(outer_product(std::vector<std::vector<double>>{}), ArgumentError);

    Rng rng(3);
    const std::vector<std::vector<double>> units{random_unit_vector(rng, 3), random_unit_vector(rng, 5),
                                                 random_unit_vector(rng, 2)};
    CHECK(frobenius_norm(outer_product(units)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("inner product and norm")
{
    const std::vector<std::vector<double>> a{{1, 0}, {1, 0}};
    CHECK(inner_product(outer_product(a), outer_product(a)) == 1.0);

    const std::vector<std::vector<double>> b{{1, 2}, {3, 4}};
    const std::vector<std::vector<double>> c{{1, 0}, {0, 1}};
    CHECK(inner_product(outer_product(b), outer_product(c)) == 4.0);

    const auto zero = DenseTensor(TensorShape({2, 2}));
    CHECK(inner_product(outer_product(b), zero) == 0.0);
    CHECK_THROWS_AS(inner_product(zero, DenseTensor(TensorShape({4}))), DimensionError);

    CHECK(frobenius_norm(DenseTensor(TensorShape({2, 2}), {1, 1, 1, 1})) == 2.0);
    CHECK(frobenius_norm(DenseTensor(TensorShape({2, 2}), {3, 4, 0, 0})) == 5.0);
    CHECK_THROWS_AS(DenseTensor(TensorShape({2, 2}), {1, 2, 3}), DimensionError);
}

TEST_CASE("contract_all_but examples")
{
    const auto t = tensorize(std::vector<double>{1, 2, 3, 4}, TensorShape({2, 2}));
    const std::vector<std::vector<double>> f{{1, 0}, {1, 0}};
    CHECK(contract_all_but(t, f, 1) == std::vector<double>{1, 3});
    CHECK(contract_all_but(t, f, 0) == std::vector<double>{1, 2});
    CHECK_THROWS_AS(contract_all_but(t, f, 2), ArgumentError);

    const std::vector<std::vector<double>> short_f{{1, 0}};
    CHECK_THROWS_AS(contract_all_but(t, short_f, 0), DimensionError);
    const std::vector<std::vector<double>> bad_len{{1, 0, 0}, {1, 0}};
    CHECK_THROWS_AS(contract_all_but(t, bad_len, 1), DimensionError);

    const DenseTensor zero(TensorShape({3, 2, 2}));
    const std::vector<std::vector<double>> g{{1, 1, 1}, {1, 1}, {1, 1}};
    CHECK(contract_all_but(zero, g, 0) == std::vector<double>(3, 0.0));

    Rng rng(11);
    std::vector<std::vector<double>> units{random_unit_vector(rng, 4), random_unit_vector(rng, 3),
                                           random_unit_vector(rng, 5)};
    const auto u = outer_product(units);
    for (std::size_t m = 0; m < 3; ++m) {
        const auto w = contract_all_but(u, units, m);
        for (std::size_t j = 0; j < w.size(); ++j)
            CHECK(w[j] == doctest::Approx(units[m][j]).epsilon(1e-13));
    }
}

TEST_CASE("property: contraction agrees with the multilinear form and brute force")
{
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const TensorShape shape = random_shape(rng, 5, 4);
        const DenseTensor t(shape, gaussian(rng, shape.total()));
        std::vector<std::vector<double>> f;
        for (std::size_t m = 0; m < shape.order(); ++m)
            f.push_back(gaussian(rng, shape.dim(m)));

        // Brute force sum over every entry.
        double brute = 0.0;
        for (std::size_t i = 0; i < shape.total(); ++i) {
            const auto idx = shape.multi_index(i);
            double w = t[i];
            for (std::size_t m = 0; m < shape.order(); ++m)
                w *= f[m][idx[m]];
            brute += w;
        }
        const double form = multilinear_form(t, f);
        CHECK(form == doctest::Approx(brute).epsilon(1e-12));
        CHECK(form == doctest::Approx(inner_product(t, outer_product(f))).epsilon(1e-12));
        for (std::size_t m = 0; m < shape.order(); ++m)
            CHECK(dot(contract_all_but(t, f, m), f[m]) == doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("property: multilinearity and Cauchy-Schwarz")
{
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const TensorShape shape = random_shape(rng, 4, 5);
        const DenseTensor a(shape, gaussian(rng, shape.total()));
        const DenseTensor b(shape, gaussian(rng, shape.total()));
        std::vector<std::vector<double>> f, g;
        for (std::size_t m = 0; m < shape.order(); ++m) {
            f.push_back(gaussian(rng, shape.dim(m)));
            g.push_back(gaussian(rng, shape.dim(m)));
        }
        // Linear in the tensor.
        CHECK(multilinear_form(2.0 * a + b, f) ==
              doctest::Approx(2.0 * multilinear_form(a, f) + multilinear_form(b, f)).epsilon(1e-11));
        // Linear in each factor.
        const std::size_t m = trial % shape.order();
        auto h = f;
        for (std::size_t j = 0; j < h[m].size(); ++j)
            h[m][j] = 3.0 * f[m][j] - g[m][j];
        auto k = f;
        k[m] = g[m];
        CHECK(multilinear_form(a, h) ==
              doctest::Approx(3.0 * multilinear_form(a, f) - multilinear_form(a, k)).epsilon(1e-10));
        CHECK(std::abs(inner_product(a, b)) <= frobenius_norm(a) * frobenius_norm(b) * (1 + 1e-12));
        // The norm of a rank-one tensor is the product of factor norms.
        double prod = 1.0;
        for (const auto& v : f)
            prod *= norm2(v);
        CHECK(frobenius_norm(outer_product(f)) == doctest::Approx(prod).epsilon(1e-12));
    }
}

TEST_CASE("tensor arithmetic")
{
    const TensorShape s({2, 2});
    DenseTensor a(s, {1, 2, 3, 4});
    const DenseTensor b(s, {4, 3, 2, 1});
    CHECK(vectorize(a + b) == std::vector<double>{5, 5, 5, 5});
    CHECK(vectorize(a - b) == std::vector<double>{-3, -1, 1, 3});
    CHECK(vectorize(0.5 * a) == std::vector<double>{0.5, 1, 1.5, 2});
    CHECK_THROWS_AS(a += DenseTensor(TensorShape({4})), DimensionError);
}
