#include <doctest.h>

#include "carnot/algebra.hpp"
#include "carnot/forms.hpp"

using namespace carnot;

TEST_CASE("builtin algebras validate cleanly") {
  for (const char* name : {"heisenberg:1", "heisenberg:2", "filiform:3",
                           "quaternionic-heisenberg:1", "quaternionic-heisenberg:2", "abelian:3"}) {
    auto alg = StratifiedAlgebra::by_name(name);
    auto rep = alg.validate();
    CHECK_MESSAGE(rep.ok(), name, ": ", rep.to_string());
    CHECK(rep.warnings.empty());
  }
}

TEST_CASE("antisymmetry violation is reported with its indices") {
  // c^3_{12} = c^3_{21} = 1
  StratifiedAlgebra bad("bad", {2, 1}, {{0, 1, 2, 1.0}, {1, 0, 2, 1.0}});
  auto rep = bad.validate();
  REQUIRE_FALSE(rep.ok());
  bool found = false;
  for (const auto& v : rep.violations)
    if (v.kind == "antisymmetry" && v.indices == std::vector<int>{1, 2, 3}) found = true;
  CHECK(found);
}

TEST_CASE("grading violation: bracket of two horizontals landing in layer 3") {
  StratifiedAlgebra bad("bad", {2, 0, 1}, {{0, 1, 2, 1.0}});
  auto rep = bad.validate();
  REQUIRE_FALSE(rep.ok());
  CHECK(rep.violations[0].kind == "grading");
}

TEST_CASE("jacobi violation is caught") {
  // layers {3,1,1} with [X1,X2]=X4, [X3,X4]=X5:
  // [[X1,X2],X3] = [X4,X3] = -X5 while the cyclic partners vanish.
  StratifiedAlgebra bad("bad", {3, 1, 1}, {{0, 1, 3, 1.0}, {2, 3, 4, 1.0}});
  auto rep = bad.validate();
  REQUIRE_FALSE(rep.ok());
  bool found = false;
  for (const auto& v : rep.violations)
    if (v.kind == "jacobi" && v.indices == std::vector<int>{1, 2, 3}) found = true;
  CHECK(found);
}

TEST_CASE("generation deficiency is a warning, not a violation") {
  // layer 2 declared 2-dimensional but brackets only generate one direction
  StratifiedAlgebra thin("thin", {2, 2}, {{0, 1, 2, 1.0}});
  auto rep = thin.validate();
  CHECK(rep.ok());
  REQUIRE_FALSE(rep.warnings.empty());
}

TEST_CASE("weights and homogeneous dimension") {
  auto f3 = StratifiedAlgebra::filiform3();
  CHECK(f3.weight(0) == 1);
  CHECK(f3.weight(1) == 1);
  CHECK(f3.weight(2) == 2);
  CHECK(f3.weight(3) == 3);
  CHECK(f3.homogeneous_dim() == 1 + 1 + 2 + 3);
  auto h2 = StratifiedAlgebra::heisenberg(2);
  CHECK(h2.homogeneous_dim() == 4 + 2);
}

TEST_CASE("lie differential d0: abelian algebra kills everything") {
  auto ab = StratifiedAlgebra::abelian(3);
  Rng rng(7);
  MatrixXd mu(1, 3);
  for (int i = 0; i < 3; ++i) mu(0, i) = rng.uniform(-1, 1);
  auto d0mu = lie_differential_d0(InvariantForm::one_form(ab, mu, 0));
  CHECK(d0mu.max_abs() == 0.0);
}

TEST_CASE("lie differential d0 on the step-2 base: worked cocycle") {
  // F^2 base (X1, X2, X3 with [X1,X2] = X3), rho(X1, X3) = 1:
  // d0 rho(X1, X2, X3) = -rho([X1,X2], X3) + rho([X1,X3], X2) - rho([X2,X3], X1)
  //                    = -rho(X3, X3) = 0.
  StratifiedAlgebra f2("f2", {2, 1}, {{0, 1, 2, 1.0}});
  auto rho = InvariantForm::two_form_sparse(f2, 1, {{0, 2, 0, 1.0}}, 3);
  auto d0 = lie_differential_d0(rho);
  CHECK(d0.value3(0, 0, 1, 2) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("d0 of d0 vanishes for random mixed-weight 1-forms") {
  for (const char* name : {"heisenberg:1", "filiform:3", "quaternionic-heisenberg:1"}) {
    auto alg = StratifiedAlgebra::by_name(name);
    Rng rng(11);
    MatrixXd mu(2, alg.dim());
    for (int v = 0; v < 2; ++v)
      for (int i = 0; i < alg.dim(); ++i) mu(v, i) = rng.uniform(-1, 1);
    auto dd = lie_differential_d0(lie_differential_d0(InvariantForm::one_form(alg, mu, 0)));
    double worst = 0;
    for (int v = 0; v < 2; ++v)
      for (int i = 0; i < alg.dim(); ++i)
        for (int j = i + 1; j < alg.dim(); ++j)
          for (int k = j + 1; k < alg.dim(); ++k)
            worst = std::max(worst, std::abs(dd.value3(v, i, j, k)));
    CHECK(worst < 1e-14);
  }
}

TEST_CASE("unvalidated algebra refuses group operations") {
  StratifiedAlgebra bad("bad", {2, 1}, {{0, 1, 2, 1.0}, {1, 0, 2, 1.0}});
  VectorXd p = VectorXd::Zero(3);
  CHECK_THROWS_AS((void)bad.multiply(p, p), Error);
}

TEST_CASE("mismatched algebras are a structural error") {
  auto h1 = StratifiedAlgebra::heisenberg(1);
  auto f3 = StratifiedAlgebra::filiform3();
  GroupElement a = GroupElement::identity(h1);
  GroupElement b = GroupElement::identity(f3);
  CHECK_THROWS_AS((void)multiply(a, b), Error);
}

TEST_CASE("invariant form constructors enforce antisymmetry and weight homogeneity") {
  auto h1 = StratifiedAlgebra::heisenberg(1);
  MatrixXd sym = MatrixXd::Zero(3, 3);
  sym(0, 1) = 1.0;
  sym(1, 0) = 1.0;  // not antisymmetric
  CHECK_THROWS_AS((void)InvariantForm::two_form(h1, {sym}, 0), Error);

  MatrixXd offweight = MatrixXd::Zero(1, 3);
  offweight(0, 0) = 1.0;  // weight-1 slot on a declared weight-2 form
  CHECK_THROWS_AS((void)InvariantForm::one_form(h1, offweight, 2), Error);
  CHECK_NOTHROW((void)InvariantForm::one_form(h1, offweight, 0));  // mixed weight
}
