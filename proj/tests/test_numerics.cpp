#include "edgegcn/errors.hpp"
#include "edgegcn/gradcheck.hpp"
#include "edgegcn/init.hpp"
#include "edgegcn/ops.hpp"
#include "edgegcn/optim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace edgegcn;

namespace {

Tensor leaf(Shape shape, std::vector<double> v) { return Tensor::from(std::move(shape), std::move(v), true); }

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

} // namespace

TEST(Matmul, IdentityAndHandProduct) {
    auto a = Tensor::from({2, 2}, {1, 2, 3, 4});
    auto eye = Tensor::from({2, 2}, {1, 0, 0, 1});
    EXPECT_EQ(values(matmul(a, eye)), (std::vector<double>{1, 2, 3, 4}));

    auto row = Tensor::from({1, 2}, {1, 2});
    auto col = Tensor::from({2, 1}, {3, 4});
    EXPECT_EQ(values(matmul(row, col)), (std::vector<double>{11}));
}

TEST(Matmul, BilinearGradient) {
    auto a = leaf({1, 1}, {2});
    auto b = leaf({1, 1}, {3});
    backward(sum_all(matmul(a, b)));
    EXPECT_DOUBLE_EQ(a.grad()[0], 3.0);
    EXPECT_DOUBLE_EQ(b.grad()[0], 2.0);
}

TEST(Matmul, ShapeMismatchThrows) {
    EXPECT_THROW(matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 3})), DimensionError);
}

TEST(ConcatLast, JuxtaposesAndSplitsGradient) {
    auto a = leaf({2}, {1, 2});
    auto b = leaf({1}, {3});
    auto c = concat_last(a, b);
    EXPECT_EQ(values(c), (std::vector<double>{1, 2, 3}));
    backward(sum_all(c));
    EXPECT_EQ(values(Tensor::from({2}, {a.grad()[0], a.grad()[1]})), (std::vector<double>{1, 1}));
    EXPECT_DOUBLE_EQ(b.grad()[0], 1.0);

    auto x = Tensor::from({2, 2}, {1, 2, 3, 4});
    auto empty = Tensor::zeros({2, 0});
    EXPECT_EQ(values(concat_last(x, empty)), values(x));
    EXPECT_EQ(concat_last(x, empty).shape(), x.shape());
}

TEST(ConcatLast, LeadingMismatchThrows) {
    EXPECT_THROW(concat_last(Tensor::zeros({2, 3}), Tensor::zeros({3, 3})), DimensionError);
}

TEST(Elementwise, Definitions) {
    auto r = relu(Tensor::from({2}, {-1, 2}));
    EXPECT_EQ(values(r), (std::vector<double>{0, 2}));
    EXPECT_DOUBLE_EQ(sigmoid(Tensor::scalar(0)).item(), 0.5);
    EXPECT_EQ(values(hadamard(Tensor::from({2}, {2, 3}), Tensor::from({2}, {4, 5}))), (std::vector<double>{8, 15}));
    EXPECT_THROW(hadamard(Tensor::zeros({2}), Tensor::zeros({3})), DimensionError);
}

TEST(Elementwise, SigmoidSaturatesWithoutOverflow) {
    auto s = sigmoid(Tensor::from({2}, {-1000, 1000}));
    EXPECT_EQ(s.data()[0], 0.0);
    EXPECT_EQ(s.data()[1], 1.0);
}

TEST(Elementwise, RowMaskHadamard) {
    // x: 2x2x1 with values 1..4, mask rows [10], [100]
    auto x = leaf({2, 2, 1}, {1, 2, 3, 4});
    auto mask = leaf({2, 1}, {10, 100});
    auto y = hadamard(x, mask);
    EXPECT_EQ(values(y), (std::vector<double>{10, 20, 300, 400}));
    backward(sum_all(y));
    EXPECT_DOUBLE_EQ(mask.grad()[0], 3.0);
    EXPECT_DOUBLE_EQ(mask.grad()[1], 7.0);
    EXPECT_DOUBLE_EQ(x.grad()[2], 100.0);
    EXPECT_THROW(hadamard(Tensor::zeros({2, 3, 1}), Tensor::zeros({2, 1})), DimensionError);
}

TEST(Reduce, MeanMaxAndEmptySum) {
    EXPECT_DOUBLE_EQ(reduce(Tensor::from({3}, {1, 2, 3}), 0, Reduction::mean).item(), 2.0);

    auto x = leaf({3}, {1, 5, 2});
    auto mx = reduce(x, 0, Reduction::max);
    EXPECT_DOUBLE_EQ(mx.item(), 5.0);
    backward(mx);
    EXPECT_EQ(values(Tensor::from({3}, {x.grad()[0], x.grad()[1], x.grad()[2]})), (std::vector<double>{0, 1, 0}));

    auto empty = Tensor::zeros({2, 0});
    auto s = reduce(empty, 1, Reduction::sum);
    EXPECT_EQ(values(s), (std::vector<double>{0, 0}));
    EXPECT_THROW(reduce(empty, 1, Reduction::mean), DimensionError);
    EXPECT_THROW(reduce(empty, 1, Reduction::max), DimensionError);
    EXPECT_THROW(reduce(x, 1, Reduction::sum), DimensionError);
}

TEST(Reduce, MaxTieGoesToLowestIndex) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        // Equal maxima at a random subset of positions; the gradient must land
        // on the smallest of them regardless of where the others sit.
        std::vector<double> v(6);
        std::uniform_real_distribution<double> d(-1.0, 0.5);
        for (auto& e : v) e = d(rng);
        std::vector<std::size_t> pos{0, 1, 2, 3, 4, 5};
        std::shuffle(pos.begin(), pos.end(), rng);
        const std::size_t ties = 2 + trial % 3;
        for (std::size_t t = 0; t < ties; ++t) v[pos[t]] = 1.0;
        const std::size_t expect = *std::min_element(pos.begin(), pos.begin() + static_cast<long>(ties));
        auto x = leaf({6}, v);
        backward(reduce(x, 0, Reduction::max));
        for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(x.grad()[i], i == expect ? 1.0 : 0.0);
    }
}

TEST(Reduce, AxisSemanticsOnRank3) {
    // x(i,k,c) = 100i + 10k + c over 2x3x2
    std::vector<double> v;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 3; ++k)
            for (int c = 0; c < 2; ++c) v.push_back(100 * i + 10 * k + c);
    auto x = Tensor::from({2, 3, 2}, v);
    auto rows = reduce(x, 1, Reduction::sum);
    EXPECT_EQ(rows.shape(), (Shape{2, 2}));
    EXPECT_EQ(values(rows), (std::vector<double>{30, 33, 330, 333}));
    auto first = reduce(x, 0, Reduction::max);
    EXPECT_EQ(first.shape(), (Shape{3, 2}));
    EXPECT_EQ(values(first), (std::vector<double>{100, 101, 110, 111, 120, 121}));
}

TEST(SoftmaxCrossEntropy, UniformSaturatedAndMasked) {
    const std::vector<int> zero{0};
    EXPECT_NEAR(softmax_cross_entropy(Tensor::from({1, 2}, {0, 0}), zero).item(), std::log(2.0), 1e-15);
    const double sat = softmax_cross_entropy(Tensor::from({1, 2}, {1000, -1000}), zero).item();
    EXPECT_TRUE(std::isfinite(sat));
    EXPECT_NEAR(sat, 0.0, 1e-12);

    auto logits = Tensor::from({2, 3}, {0.3, -1.2, 2.0, 5.0, 1.0, 0.0});
    const std::vector<int> labels{2, -1};
    const double masked = softmax_cross_entropy(logits, labels, -1).item();
    const double single =
        softmax_cross_entropy(Tensor::from({1, 3}, {0.3, -1.2, 2.0}), std::vector<int>{2}).item();
    EXPECT_DOUBLE_EQ(masked, single);

    const std::vector<int> ignored{-1, -1};
    EXPECT_THROW(softmax_cross_entropy(logits, ignored, -1), std::invalid_argument);
    const std::vector<int> bad{3, 0};
    EXPECT_THROW(softmax_cross_entropy(logits, bad), std::out_of_range);
}

TEST(SoftmaxCrossEntropy, ShiftInvariance) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-5, 5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t b = 1 + trial % 5, c = 2 + trial % 4;
        std::vector<double> v(b * c), shifted(b * c);
        std::vector<int> labels(b);
        for (std::size_t r = 0; r < b; ++r) {
            const double shift = d(rng) * 20;
            labels[r] = static_cast<int>(rng() % c);
            for (std::size_t k = 0; k < c; ++k) {
                v[r * c + k] = d(rng);
                shifted[r * c + k] = v[r * c + k] + shift;
            }
        }
        const double base = softmax_cross_entropy(Tensor::from({b, c}, v), labels).item();
        const double moved = softmax_cross_entropy(Tensor::from({b, c}, shifted), labels).item();
        EXPECT_NEAR(base, moved, 1e-10);
    }
}

TEST(Backward, ProductDeadUnitAndSigmoidSlope) {
    auto x = leaf({}, {2});
    auto y = leaf({}, {3});
    backward(hadamard(x, y));
    EXPECT_DOUBLE_EQ(x.grad()[0], 3.0);
    EXPECT_DOUBLE_EQ(y.grad()[0], 2.0);

    auto z = leaf({}, {1.5});
    backward(relu(scale(z, -1.0)));
    EXPECT_DOUBLE_EQ(z.grad()[0], 0.0);

    auto w = leaf({}, {0.0});
    backward(sigmoid(w));
    EXPECT_DOUBLE_EQ(w.grad()[0], 0.25);
}

TEST(Backward, NonScalarThrowsAndLeafGradsAccumulate) {
    auto x = leaf({2}, {1, 2});
    EXPECT_THROW(backward(scale(x, 2.0)), DimensionError);

    auto loss = sum_all(scale(x, 3.0));
    backward(loss);
    backward(loss);
    EXPECT_DOUBLE_EQ(x.grad()[0], 6.0);
    x.zero_grad();
    backward(loss);
    EXPECT_DOUBLE_EQ(x.grad()[1], 3.0);
}

TEST(Backward, NoGradGuardSkipsTape) {
    auto x = leaf({2}, {1, 2});
    NoGradGuard guard;
    auto y = sum_all(x);
    EXPECT_FALSE(y.requires_grad());
}

TEST(Backward, DebugChecksCatchNonFinite) {
    set_debug_checks(true);
    auto x = Tensor::from({1}, {std::numeric_limits<double>::infinity()});
    EXPECT_THROW(scale(x, 0.0), NumericError);
    set_debug_checks(false);
    EXPECT_NO_THROW(scale(x, 0.0));
}

TEST(GradCheck, PolynomialAndConstant) {
    auto square = [](const std::vector<Tensor>& in) { return sum_all(hadamard(in[0], in[0])); };
    EXPECT_LT(grad_check(square, {Tensor::scalar(3.0)}), 1e-8);

    auto constant = [](const std::vector<Tensor>&) { return Tensor::scalar(4.0); };
    EXPECT_EQ(grad_check(constant, {Tensor::from({2}, {1, 2})}), 0.0);
}

TEST(GradCheck, RandomComposites) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        auto x = uniform({4, 3}, -1, 1, rng);
        auto w = uniform({3, 5}, -1, 1, rng);
        auto b = uniform({5}, -1, 1, rng);
        auto mask = uniform({2, 5}, 0.1, 1, rng);
        const std::vector<std::size_t> idx{1, 3, 3, 0};
        const std::vector<std::size_t> seg{0, 1, 1, 0};
        const std::vector<int> labels{2, 0, 4, 1};
        const auto adj = SparseMatrix(4, 4, {{0, 0, 0.5}, {0, 1, 0.5}, {1, 1, 1.0}, {2, 3, 0.3}, {3, 2, 0.7}});
        auto f = [&](const std::vector<Tensor>& in) {
            auto h = sigmoid(linear(spmm(adj, in[0]), in[1], in[2]));
            auto g = gather_rows(h, idx);
            auto cube = reshape(concat_last(g, scale(g, -0.5)), {2, 2, 10});
            auto masked = hadamard(linear(cube, Tensor::from({10, 5}, std::vector<double>(50, 0.1))), in[3]);
            auto agg = add(reduce(masked, 1, Reduction::mean), reduce(masked, 0, Reduction::max));
            auto seg_out = segment_reduce(h, seg, 3, Reduction::max);
            auto tail = add(reduce(seg_out, 0, Reduction::sum), reduce(agg, 0, Reduction::mean));
            auto logits = relu(add(h, scale(gather_rows(reshape(tail, {1, 5}), std::vector<std::size_t>{0, 0, 0, 0}), 0.3)));
            return add(softmax_cross_entropy(logits, labels), scale(sum_squares(in[1]), 0.01));
        };
        EXPECT_LT(grad_check(f, {x, w, b, mask}), 1e-4) << "trial " << trial;
    }
}

TEST(SegmentReduce, EmptySegmentsAreZero) {
    auto x = leaf({3, 2}, {1, 2, 3, 4, 5, 6});
    const std::vector<std::size_t> seg{0, 0, 2};
    for (auto mode : {Reduction::sum, Reduction::mean, Reduction::max}) {
        auto out = segment_reduce(x, seg, 3, mode);
        EXPECT_EQ(out.at({1, 0}), 0.0);
        EXPECT_EQ(out.at({1, 1}), 0.0);
    }
    EXPECT_EQ(segment_reduce(x, seg, 3, Reduction::mean).at({0, 1}), 3.0);
    EXPECT_EQ(segment_reduce(x, seg, 3, Reduction::max).at({2, 0}), 5.0);
    EXPECT_THROW(segment_reduce(x, seg, 2, Reduction::sum), DimensionError);
}

TEST(Adam, FirstStepZeroGradAndSignSgd) {
    auto p = leaf({1}, {1.0});
    std::vector<Tensor> params{p};
    AdamState state(params, {.lr = 0.01});
    p.mutable_grad()[0] = 2.0;
    adam_step(params, state);
    EXPECT_NEAR(p.data()[0] - 1.0, -0.01 * 2.0 / (2.0 + 1e-8), 1e-15);
    EXPECT_EQ(state.step_count, 1);

    auto q = leaf({2}, {0.5, -0.5});
    std::vector<Tensor> qs{q};
    AdamState qstate(qs, {.lr = 0.1});
    adam_step(qs, qstate);
    EXPECT_EQ(q.data()[0], 0.5);
    EXPECT_EQ(q.data()[1], -0.5);

    auto r = leaf({2}, {0.0, 0.0});
    std::vector<Tensor> rs{r};
    AdamState rstate(rs, {.lr = 0.1, .beta1 = 0.0, .beta2 = 0.0, .eps = 0.0});
    for (int step = 0; step < 2; ++step) {
        r.mutable_grad()[0] = 3.0;
        r.mutable_grad()[1] = -0.25;
        adam_step(rs, rstate);
    }
    EXPECT_DOUBLE_EQ(r.data()[0], -0.2);
    EXPECT_DOUBLE_EQ(r.data()[1], 0.2);
    EXPECT_EQ(rstate.step_count, 2);
}

TEST(Adam, MissingGradThrows) {
    std::vector<Tensor> params{Tensor::zeros({2})};
    AdamState state(params, {});
    EXPECT_THROW(adam_step(params, state), std::logic_error);
}

TEST(Determinism, ForwardBackwardBitIdentical) {
    auto run = [] {
        std::mt19937_64 rng(5);
        auto w = glorot_uniform(6, 4, rng);
        auto x = uniform({5, 6}, -1, 1, rng);
        auto y = relu(linear(x, w));
        auto loss = softmax_cross_entropy(y, std::vector<int>{0, 1, 2, 3, 0});
        backward(loss);
        std::vector<double> out(w.grad().begin(), w.grad().end());
        out.push_back(loss.item());
        return out;
    };
    EXPECT_EQ(run(), run());
}
