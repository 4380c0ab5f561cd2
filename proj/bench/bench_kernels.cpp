// Wall-clock comparison of the OpenMP kernels against their serial reference
// implementations, with a bitwise equality check on the outputs.

#include <chrono>
#include <cstdio>
#include <functional>

#include "carnot/hoelder.hpp"
#include "carnot/lift.hpp"
#include "carnot/symplectic.hpp"

using namespace carnot;

namespace {

double wall(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-18s serial %7.3f s   parallel %7.3f s   speedup %5.2fx   outputs %s\n", name,
              serial, parallel, serial / parallel, identical ? "bitwise-equal" : "DIFFER");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, default threads\n");
#else
  std::printf("OpenMP disabled at build time; both columns run serially\n");
#endif

  auto h1 = StratifiedAlgebra::heisenberg(1);
  auto r2 = StratifiedAlgebra::abelian(2);
  auto ext = CentralExtension::build(r2, {0, 1}, {{0, 1, 0, 1.0}});

  {  // group convolution of the Weierstrass lift on the 3d chart
    auto kern = MollifierKernel::standard(h1, 13);
    auto f = builtin_map("lift-shear-weier:6").fn;
    Box box;
    box.lo = VectorXd::Constant(3, -1.0);
    box.hi = VectorXd::Constant(3, 1.0);
    SampledMap a, b;
    double ts = wall([&] { a = group_convolve_serial(f, h1, 0.05, kern, box, {17, 17, 9}, 3); });
    double tp = wall([&] { b = group_convolve(f, h1, 0.05, kern, box, {17, 17, 9}, 3); });
    bool same = true;
    for (std::int64_t t = 0; t < a.node_count(); ++t)
      if ((a.node_value(t) - b.node_value(t)).cwiseAbs().maxCoeff() != 0.0) same = false;
    report("group_convolve", ts, tp, same);
  }

  {  // grid lift of the shear
    auto f = builtin_map("parabolic-shear").fn;
    Box chart;
    chart.lo = VectorXd::Constant(3, -1.0);
    chart.hi = VectorXd::Constant(3, 1.0);
    LiftOptions opt;
    opt.run_probe = false;
    SampledMap a, b;
    double ts = wall([&] {
      a = lift_map_serial(f, ext, ext, VectorXd::Zero(3), VectorXd::Zero(3), chart, {33, 33, 5},
                          opt);
    });
    double tp = wall([&] {
      b = lift_map(f, ext, ext, VectorXd::Zero(3), VectorXd::Zero(3), chart, {33, 33, 5}, opt);
    });
    bool same = true;
    for (std::int64_t t = 0; t < a.node_count(); ++t)
      if ((a.node_value(t) - b.node_value(t)).cwiseAbs().maxCoeff() != 0.0) same = false;
    report("lift_map", ts, tp, same);
  }

  {  // defect probe family
    auto f = builtin_map("parabolic-shear").fn;
    Box chart;
    chart.lo = VectorXd::Constant(2, -1.2);
    chart.hi = VectorXd::Constant(2, 1.2);
    CheckLiftOptions opt;
    CheckLiftReport a, b;
    opt.parallel = false;
    double ts = wall([&] { a = check_lift(f, ext, ext, chart, opt); });
    opt.parallel = true;
    double tp = wall([&] { b = check_lift(f, ext, ext, chart, opt); });
    bool same = a.records.size() == b.records.size();
    for (size_t i = 0; same && i < a.records.size(); ++i)
      if (a.records[i].defect != b.records[i].defect) same = false;
    report("check_lift", ts, tp, same);
  }

  {  // Moser flow on a stretched map
    Box box;
    box.lo = VectorXd::Constant(2, -1.0);
    box.hi = VectorXd::Constant(2, 1.0);
    MapFn stretch = [](const VectorXd& x) {
      VectorXd y(2);
      y << 1.01 * x[0], x[1];
      return y;
    };
    auto f = SampledMap::sample(stretch, box, {129, 129}, 2);
    SampledMap a, b;
    double ts = wall([&] { a = moser_correct_serial(f, nullptr); });
    double tp = wall([&] { b = moser_correct(f, nullptr); });
    bool same = true;
    for (std::int64_t t = 0; t < a.node_count(); ++t)
      if ((a.node_value(t) - b.node_value(t)).cwiseAbs().maxCoeff() != 0.0) same = false;
    report("moser_correct", ts, tp, same);
  }

  return 0;
}
