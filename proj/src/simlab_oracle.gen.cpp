// Generated by tools/gen-true-ate (seed 20240501, 10000000 draws per
// scenario).  Do not edit by hand; rerun the tool to refresh.
//
// Analytic cross-checks: B = 22.5, M1 = 3, M2 = 2.5.

namespace mbal::oracle {

extern const double kTrueAteB = 22.5;
extern const double kTrueAteM1 = 3.0;
extern const double kTrueAteM2 = 2.5;

}  // namespace mbal::oracle
