#include "generators.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "oracle.hpp"
#include "qwp/measurement.hpp"

namespace qwp::gen {

namespace {

std::size_t pick(SplitMix64& rng, std::size_t bound) {
  return static_cast<std::size_t>(rng.next() % bound);
}

Basis random_basis(SplitMix64& rng, const std::string& name,
                   const std::string& subsystem, std::size_t dim,
                   const std::string& label_prefix) {
  const Eigen::MatrixXcd u = oracle::random_unitary(dim, rng);
  std::vector<Basis::Vector> vectors;
  vectors.reserve(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    std::vector<cplx> components(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      components[i] = u(static_cast<Eigen::Index>(i),
                        static_cast<Eigen::Index>(k));
    }
    vectors.push_back(
        Basis::Vector{label_prefix + std::to_string(k), std::move(components)});
  }
  return Basis(name, subsystem, std::move(vectors));
}

Basis identity_basis(const std::string& name, const std::string& subsystem,
                     std::size_t dim, const std::string& label_prefix) {
  std::vector<Basis::Vector> vectors;
  vectors.reserve(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    std::vector<cplx> components(dim, cplx(0.0, 0.0));
    components[k] = cplx(1.0, 0.0);
    vectors.push_back(
        Basis::Vector{label_prefix + std::to_string(k), std::move(components)});
  }
  return Basis(name, subsystem, std::move(vectors));
}

}  // namespace

Protocol random_protocol(SplitMix64& rng, const ProtocolOptions& options) {
  const std::size_t n = 3 + pick(rng, 2);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[pick(rng, i)]);
  }
  const std::size_t observer_count = 1 + pick(rng, n - 1);
  std::vector<bool> is_observer(n, false);
  for (std::size_t i = 0; i < observer_count; ++i) is_observer[order[i]] = true;

  std::vector<std::size_t> dims(n, 2);
  std::size_t max_target_dim = 2;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_observer[i]) continue;
    dims[i] = 2 + pick(rng, 2);
    max_target_dim = std::max(max_target_dim, dims[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_observer[i]) continue;
    dims[i] = max_target_dim + pick(rng, 4 - max_target_dim);
  }

  std::vector<Subsystem> subsystems;
  subsystems.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    subsystems.push_back(Subsystem{"s" + std::to_string(i), dims[i]});
  }

  std::vector<Basis> bases;
  std::vector<std::size_t> main_basis_of(n);
  std::vector<std::ptrdiff_t> alt_basis_of(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& name = subsystems[i].name;
    main_basis_of[i] = bases.size();
    if (rng.uniform() < 0.5) {
      bases.push_back(identity_basis("main", name, dims[i], "m"));
    } else {
      bases.push_back(random_basis(rng, "main", name, dims[i], "m"));
    }
    if (rng.uniform() < 0.5) {
      alt_basis_of[i] = static_cast<std::ptrdiff_t>(bases.size());
      bases.push_back(random_basis(rng, "alt", name, dims[i], "a"));
    }
  }

  std::vector<Step> steps;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_observer[i]) continue;
    steps.push_back(PrepareStep{subsystems[i].name,
                                bases[main_basis_of[i]].at(0).components});
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (is_observer[i] || rng.uniform() >= 0.75) continue;
    steps.push_back(
        PrepareStep{subsystems[i].name, oracle::random_state(dims[i], rng)});
  }

  const auto basis_of = [&](std::size_t i) -> const Basis& {
    if (alt_basis_of[i] >= 0 && rng.uniform() < 0.5) {
      return bases[static_cast<std::size_t>(alt_basis_of[i])];
    }
    return bases[main_basis_of[i]];
  };
  const auto random_report = [&]() {
    std::vector<ReportRequest> requests;
    const std::size_t count = 1 + pick(rng, 2);
    for (std::size_t r = 0; r < count; ++r) {
      const std::size_t i = pick(rng, n);
      requests.push_back(ReportRequest{subsystems[i].name, basis_of(i)});
    }
    return ReportStep{std::move(requests)};
  };

  std::vector<std::size_t> fresh;
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_observer[i]) fresh.push_back(i);
  }
  std::vector<std::size_t> targets;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_observer[i]) targets.push_back(i);
  }

  // Picks a still-ready observer able to hold `outcomes` records.
  const auto take_observer = [&](std::size_t outcomes) -> std::ptrdiff_t {
    std::vector<std::size_t> fits;
    for (std::size_t slot = 0; slot < fresh.size(); ++slot) {
      if (dims[fresh[slot]] >= outcomes) fits.push_back(slot);
    }
    if (fits.empty()) return -1;
    const std::size_t slot = fits[pick(rng, fits.size())];
    const std::size_t index = fresh[slot];
    fresh.erase(fresh.begin() + static_cast<std::ptrdiff_t>(slot));
    used.push_back(index);
    return static_cast<std::ptrdiff_t>(index);
  };

  const std::size_t measures = 1 + pick(rng, options.max_measures);
  for (std::size_t m = 0; m < measures; ++m) {
    if (options.allow_collapse && rng.uniform() < 0.25) {
      const std::size_t t = targets[pick(rng, targets.size())];
      steps.push_back(CollapseStep{subsystems[t].name, basis_of(t)});
      continue;
    }
    if (options.allow_catalytic && !used.empty() && rng.uniform() < 0.35) {
      const std::size_t agent = used[pick(rng, used.size())];
      const std::ptrdiff_t obs = take_observer(dims[agent]);
      if (obs >= 0) {
        const Basis& cat = alt_basis_of[agent] >= 0
                               ? bases[static_cast<std::size_t>(
                                     alt_basis_of[agent])]
                               : bases[main_basis_of[agent]];
        steps.push_back(CatalyticPremeasureStep{
            subsystems[agent].name, cat,
            ObserverRegister::standard(
                bases[main_basis_of[static_cast<std::size_t>(obs)]],
                dims[agent])});
        continue;
      }
    }
    const std::size_t t = targets[pick(rng, targets.size())];
    const std::ptrdiff_t obs = take_observer(dims[t]);
    if (obs < 0) break;
    steps.push_back(PremeasureStep{
        subsystems[t].name, basis_of(t),
        ObserverRegister::standard(
            bases[main_basis_of[static_cast<std::size_t>(obs)]], dims[t])});
    if (rng.uniform() < 0.25) steps.push_back(random_report());
  }
  steps.push_back(random_report());

  return Protocol{SystemLayout(std::move(subsystems)), std::move(bases),
                  std::move(steps)};
}

}  // namespace qwp::gen
