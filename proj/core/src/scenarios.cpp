#include "qwp/scenarios.hpp"

#include <cmath>
#include <stdexcept>

namespace qwp {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Basis make_basis2(std::string name, std::string sub, std::string l0, cplx a00,
                  cplx a01, std::string l1, cplx a10, cplx a11) {
  return Basis(std::move(name), std::move(sub),
               {Basis::Vector{std::move(l0), {a00, a01}},
                Basis::Vector{std::move(l1), {a10, a11}}});
}

Basis spin_z() {
  return make_basis2("z", "spin", "up", 1.0, 0.0, "down", 0.0, 1.0);
}

Basis spin_x() {
  return make_basis2("x", "spin", "right", kInvSqrt2, kInvSqrt2, "left",
                     kInvSqrt2, -kInvSqrt2);
}

Basis record_of(std::string sub, std::string l0, std::string l1) {
  return make_basis2("rec", std::move(sub), std::move(l0), 1.0, 0.0,
                     std::move(l1), 0.0, 1.0);
}

Basis cat_of_A() {
  return make_basis2("cat", "A", "plus", kInvSqrt2, kInvSqrt2, "minus",
                     kInvSqrt2, -kInvSqrt2);
}

constexpr std::string_view kCatSource = R"(qwp 1
# spin prepared along +x; A records the z outcome; B then measures A
# in the record-superposing basis.
system spin:2
system A:2
system B:2
basis z on spin = [up: (1,0),(0,0); down: (0,0),(1,0)]
basis x on spin = [right: (1/sqrt2,0),(1/sqrt2,0); left: (1/sqrt2,0),(-1/sqrt2,0)]
basis rec on A = [U: (1,0),(0,0); D: (0,0),(1,0)]
basis cat on A = [plus: (1/sqrt2,0),(1/sqrt2,0); minus: (1/sqrt2,0),(-1/sqrt2,0)]
basis rec on B = [Y: (1,0),(0,0); N: (0,0),(1,0)]
prepare spin right
prepare A U
prepare B Y
measure spin in z record A
catmeasure A in cat record B
report spin A B in z rec rec
)";

constexpr std::string_view kDogSource = R"(qwp 1
# the process as deduced by an observer who recorded "up": spin up, A holding
# record U, then B's catalytic measurement of A.
system spin:2
system A:2
system B:2
basis z on spin = [up: (1,0),(0,0); down: (0,0),(1,0)]
basis rec on A = [U: (1,0),(0,0); D: (0,0),(1,0)]
basis cat on A = [plus: (1/sqrt2,0),(1/sqrt2,0); minus: (1/sqrt2,0),(-1/sqrt2,0)]
basis rec on B = [Y: (1,0),(0,0); N: (0,0),(1,0)]
prepare spin up
prepare A U
prepare B Y
catmeasure A in cat record B
report spin in z
)";

constexpr std::string_view kPetSource = R"(qwp 1
# spin along +x; A records the z outcome; B measures the spin itself in x,
# leaving A's records alone.
system spin:2
system A:2
system B:2
basis z on spin = [up: (1,0),(0,0); down: (0,0),(1,0)]
basis x on spin = [right: (1/sqrt2,0),(1/sqrt2,0); left: (1/sqrt2,0),(-1/sqrt2,0)]
basis rec on A = [U: (1,0),(0,0); D: (0,0),(1,0)]
basis rec on B = [R: (1,0),(0,0); L: (0,0),(1,0)]
prepare spin right
prepare A U
prepare B R
measure spin in z record A
measure spin in x record B
report spin A in z rec
)";

}  // namespace

std::optional<Scenario> scenario_from_name(std::string_view name) {
  if (name == "cat") return Scenario::cat;
  if (name == "dog") return Scenario::dog;
  if (name == "pet") return Scenario::pet;
  return std::nullopt;
}

std::string_view scenario_name(Scenario scenario) {
  switch (scenario) {
    case Scenario::cat: return "cat";
    case Scenario::dog: return "dog";
    case Scenario::pet: return "pet";
  }
  throw std::logic_error("unreachable");
}

Protocol builtin_protocol(Scenario scenario) {
  Protocol p;
  p.layout = SystemLayout({{"spin", 2}, {"A", 2}, {"B", 2}});
  const Basis z = spin_z();
  const Basis rec_a = record_of("A", "U", "D");
  const Basis cat_a = cat_of_A();

  switch (scenario) {
    case Scenario::cat: {
      const Basis x = spin_x();
      const Basis rec_b = record_of("B", "Y", "N");
      p.bases = {z, x, rec_a, cat_a, rec_b};
      p.steps = {
          PrepareStep{"spin", {kInvSqrt2, kInvSqrt2}},
          PrepareStep{"A", {1.0, 0.0}},
          PrepareStep{"B", {1.0, 0.0}},
          PremeasureStep{"spin", z, ObserverRegister::standard(rec_a, 2)},
          CatalyticPremeasureStep{"A", cat_a,
                                  ObserverRegister::standard(rec_b, 2)},
          ReportStep{{ReportRequest{"spin", z}, ReportRequest{"A", rec_a},
                      ReportRequest{"B", rec_b}}},
      };
      break;
    }
    case Scenario::dog: {
      const Basis rec_b = record_of("B", "Y", "N");
      p.bases = {z, rec_a, cat_a, rec_b};
      p.steps = {
          PrepareStep{"spin", {1.0, 0.0}},
          PrepareStep{"A", {1.0, 0.0}},
          PrepareStep{"B", {1.0, 0.0}},
          CatalyticPremeasureStep{"A", cat_a,
                                  ObserverRegister::standard(rec_b, 2)},
          ReportStep{{ReportRequest{"spin", z}}},
      };
      break;
    }
    case Scenario::pet: {
      const Basis x = spin_x();
      const Basis rec_b = record_of("B", "R", "L");
      p.bases = {z, x, rec_a, rec_b};
      p.steps = {
          PrepareStep{"spin", {kInvSqrt2, kInvSqrt2}},
          PrepareStep{"A", {1.0, 0.0}},
          PrepareStep{"B", {1.0, 0.0}},
          PremeasureStep{"spin", z, ObserverRegister::standard(rec_a, 2)},
          PremeasureStep{"spin", x, ObserverRegister::standard(rec_b, 2)},
          ReportStep{{ReportRequest{"spin", z}, ReportRequest{"A", rec_a}}},
      };
      break;
    }
  }
  return p;
}

std::string_view scenario_source(Scenario scenario) {
  switch (scenario) {
    case Scenario::cat: return kCatSource;
    case Scenario::dog: return kDogSource;
    case Scenario::pet: return kPetSource;
  }
  throw std::logic_error("unreachable");
}

Trace run_cat() { return run_protocol(builtin_protocol(Scenario::cat)); }
Trace run_dog() { return run_protocol(builtin_protocol(Scenario::dog)); }
Trace run_pet() { return run_protocol(builtin_protocol(Scenario::pet)); }

Trace run_scenario(Scenario scenario) {
  return run_protocol(builtin_protocol(scenario));
}

Protocol cat_second_look_protocol() {
  Protocol p = builtin_protocol(Scenario::cat);
  p.layout = SystemLayout({{"spin", 2}, {"A", 2}, {"B", 2}, {"A2", 2}});
  const Basis rec_a2 = record_of("A2", "U2", "D2");
  p.bases.push_back(rec_a2);
  const Basis z = spin_z();
  const Basis rec_a = record_of("A", "U", "D");
  // Drop the cat report, append the second look, then report both records.
  p.steps.pop_back();
  p.steps.push_back(
      PremeasureStep{"spin", z, ObserverRegister::standard(rec_a2, 2)});
  p.steps.push_back(ReportStep{{ReportRequest{"spin", z},
                                ReportRequest{"A", rec_a},
                                ReportRequest{"A2", rec_a2}}});
  return p;
}

}  // namespace qwp
