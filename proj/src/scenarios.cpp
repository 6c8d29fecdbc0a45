#include "tpflow/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "tpflow/vtk.hpp"

namespace tpflow {

namespace fs = std::filesystem;

namespace {

constexpr double kQ5Inflow = 3e5;
constexpr double kQ5Outflow = 1e5;
constexpr double kQ5InflowSaturation = 0.7;
constexpr double kQ5InitialSaturation = 0.2;

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void prepare_dir(const RunConfig& c) {
  fs::create_directories(c.output_dir);
  open_out(fs::path(c.output_dir) / "config.resolved") << to_text(c);
}

std::vector<SchemeConfig> schemes_of(const RunConfig& c, double tau) {
  std::vector<SchemeConfig> out;
  for (const auto& name : c.schemes) {
    SchemeConfig s = parse_scheme(name, tau);
    s.tol = c.tol;
    s.max_iters = c.max_iters;
    out.push_back(s);
  }
  return out;
}

double mean_iterations(const std::vector<StepReport>& reports) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : reports) {
    if (r.bootstrap) continue;
    sum += r.subiteration.iterations;
    ++n;
  }
  return n ? sum / n : 0.0;
}

// θ-schemes compute the pressure only at t^{n+θ}; compare it there.
ErrorSample series_sample(const FeSpace& space, const ManufacturedCase& mms, const StepRecord& rec) {
  if (rec.p_theta) {
    const double t_theta = rec.report.t - rec.tau + rec.theta * rec.tau;
    return error_sample(space, mms, *rec.p_theta, t_theta, *rec.s_new, rec.report.t, rec.report.step);
  }
  return error_sample(space, mms, *rec.p_new, *rec.s_new, rec.report.t, rec.report.step);
}

}  // namespace

std::shared_ptr<const FeSpace> unit_square_space(int n, int degree) {
  auto mesh = std::make_shared<const Mesh>(build_rect_mesh(1.0, 1.0, n, n, 1.0));
  return std::make_shared<const FeSpace>(mesh, degree);
}

Problem make_mms_problem(std::shared_ptr<const FeSpace> space, std::shared_ptr<const ManufacturedCase> mms) {
  Problem pb;
  pb.space = std::move(space);
  pb.model = mms->model();
  pb.sources.total = [mms](double x, double y, double t) { return mms->sources(x, y, t).total; };
  pb.sources.aqueous = [mms](double x, double y, double t) { return mms->sources(x, y, t).aqueous; };
  pb.bc.pressure_dirichlet = {BoundaryTag::DirichletAll};
  pb.bc.pressure_value = [mms](double x, double y, double t) { return mms->pressure(x, y, t); };
  pb.bc.saturation_dirichlet = {BoundaryTag::DirichletAll};
  pb.bc.saturation_value = [mms](double x, double y, double t) { return mms->saturation(x, y, t); };
  return pb;
}

std::shared_ptr<const FeSpace> relax_space(int n, int degree) {
  auto mesh = std::make_shared<const Mesh>(build_rect_mesh(1.0, 1.0, n, n, kRelaxPermeability));
  return std::make_shared<const FeSpace>(mesh, degree);
}

Problem make_relax_problem(std::shared_ptr<const FeSpace> space) {
  Problem pb;
  pb.space = std::move(space);
  pb.model = mms_fluid_model();
  pb.bc.pin_pressure = true;
  return pb;
}

Field relax_initial_saturation(const FeSpace& space) {
  return space.interpolate([](double x, double y) {
    return 0.5 + 0.2 * std::cos(std::numbers::pi * x) * std::cos(std::numbers::pi * y);
  });
}

Problem make_q5spot_problem(std::shared_ptr<const FeSpace> space) {
  Problem pb;
  pb.space = std::move(space);
  pb.model = q5spot_fluid_model();
  pb.bc.pressure_dirichlet = {BoundaryTag::Gamma1, BoundaryTag::Gamma4};
  pb.bc.pressure_value = [](double x, double y, double) {
    // Gamma1 hugs the origin, Gamma4 the opposite corner.
    return x + y < 100.0 ? kQ5Inflow : kQ5Outflow;
  };
  pb.bc.saturation_dirichlet = {BoundaryTag::Gamma1};
  pb.bc.saturation_value = [](double, double, double) { return kQ5InflowSaturation; };
  pb.bc.aqueous_outflow = {BoundaryTag::Gamma4};
  return pb;
}

std::shared_ptr<const FeSpace> q5spot_space(int n, int degree) {
  const CornerPolicy policy = n % 20 == 0 ? CornerPolicy::Reject : CornerPolicy::SnapOutward;
  auto mesh = std::make_shared<const Mesh>(build_q5spot_mesh(n, policy));
  return std::make_shared<const FeSpace>(mesh, degree);
}

MmsOutcome run_mms(const SchemeConfig& scheme, int n, int degree, double final_time, bool record_series) {
  auto mms = std::make_shared<const ManufacturedCase>(final_time);
  auto space = unit_square_space(n, degree);
  Stepper stepper(make_mms_problem(space, mms), scheme);
  const Field p0 = space->interpolate([&](double x, double y) { return mms->pressure(x, y, 0.0); });
  const Field s0 = space->interpolate([&](double x, double y) { return mms->saturation(x, y, 0.0); });

  MmsOutcome out;
  out.dofs = space->num_dofs();
  const bool midpoint = scheme.kind == SchemeKind::Theta && scheme.theta == 0.5;
  const auto observer = [&](const StepRecord& rec) {
    if (record_series)
      out.series.samples.push_back(series_sample(*space, *mms, rec));
    if (midpoint && rec.p_theta) {
      const double t_mid = rec.report.t - rec.tau + rec.theta * rec.tau;
      if (auto row = energy_balance_row(stepper.problem(), *rec.p_theta, *rec.s_old, *rec.s_new, rec.tau, t_mid,
                                        rec.report.step))
        out.ledger.add(*row);
    }
  };
  out.run = run(stepper, p0, s0, 0.0, final_time, observer);
  if (out.run.completed())
    out.final_error = error_sample(*space, *mms, out.run.final_state.p, out.run.final_state.s,
                                   out.run.final_state.t, out.run.final_state.step);
  return out;
}

RelaxOutcome run_relax(const SchemeConfig& scheme, int n, int degree, double final_time) {
  auto space = relax_space(n, degree);
  Stepper stepper(make_relax_problem(space), scheme);
  RelaxOutcome out;
  const auto observer = [&](const StepRecord& rec) {
    const Field& p = rec.p_theta ? *rec.p_theta : *rec.p_new;
    const double t_mid = rec.report.t - rec.tau + rec.theta * rec.tau;
    if (auto row = energy_balance_row(stepper.problem(), p, *rec.s_old, *rec.s_new, rec.tau, t_mid, rec.report.step))
      out.ledger.add(*row);
  };
  const Field p0 = Field::Zero(space->num_dofs());
  out.run = run(stepper, p0, relax_initial_saturation(*space), 0.0, final_time, observer);
  return out;
}

Q5Outcome run_q5spot(const SchemeConfig& scheme, int n, int degree, double final_time, const SnapshotFn& snapshot) {
  auto space = q5spot_space(n, degree);
  Stepper stepper(make_q5spot_problem(space), scheme);
  const Field p0 = Field::Constant(space->num_dofs(), kQ5Outflow);
  const Field s0 = Field::Constant(space->num_dofs(), kQ5InitialSaturation);
  if (snapshot) snapshot(0.0, p0, s0);
  const auto observer = [&](const StepRecord& rec) {
    if (snapshot) snapshot(rec.report.t, *rec.p_new, *rec.s_new);
  };
  const RunResult r = run(stepper, p0, s0, 0.0, final_time, observer);

  Q5Outcome out;
  out.scheme = scheme_name(scheme);
  out.tau = scheme.tau;
  out.completed = r.completed();
  if (r.failure) out.failure = r.failure->what();
  out.steps = static_cast<int>(r.reports.size());
  out.mean_iterations = mean_iterations(r.reports);
  if (out.completed) {
    out.final_s = r.final_state.s;
    out.min_s = out.final_s.minCoeff();
    out.max_s = out.final_s.maxCoeff();
  }
  return out;
}

void write_step_log(std::ostream& out, const std::vector<StepReport>& reports, const std::vector<double>* wall) {
  out << "step,t,iterations,inc_p,inc_s,converged,bootstrap" << (wall ? ",wall_seconds" : "") << '\n';
  out.precision(10);
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    const auto& sub = r.subiteration;
    out << r.step << ',' << r.t << ',' << sub.iterations << ',';
    if (!sub.pressure_increments.empty()) out << sub.pressure_increments.back();
    out << ',';
    if (!sub.saturation_increments.empty()) out << sub.saturation_increments.back();
    out << ',' << sub.converged << ',' << r.bootstrap;
    if (wall) out << ',' << (k < wall->size() ? (*wall)[k] : 0.0);
    out << '\n';
  }
}

int cmd_converge(const RunConfig& c, std::ostream& log) {
  validate_config(c);
  prepare_dir(c);
  for (const auto& name : c.schemes) {
    std::vector<ConvergenceRow> rows;
    for (int n : c.meshes) {
      SchemeConfig s = parse_scheme(name, 1.0 / n);
      s.tol = c.tol;
      s.max_iters = c.max_iters;
      const MmsOutcome o = run_mms(s, n, c.degree, c.final_time, false);
      ConvergenceRow row;
      row.tau = 1.0 / n;
      row.dofs = o.dofs;
      if (o.run.completed()) {
        row.err_p = o.final_error.err_p;
        row.err_s = o.final_error.err_s;
      } else {
        row.failed = true;
        row.note = o.run.failure->what();
      }
      rows.push_back(row);
      log << scheme_name(s) << " h=1/" << n << (row.failed ? " failed: " + row.note : "") << '\n';
    }
    const ConvergenceTable table = convergence_rates(std::move(rows));
    auto out = open_out(fs::path(c.output_dir) / ("convergence_" + name + ".csv"));
    table.write_csv(out);
  }
  return 0;
}

int cmd_longtime(const RunConfig& c, std::ostream& log) {
  validate_config(c);
  prepare_dir(c);
  auto summary = open_out(fs::path(c.output_dir) / "summary.csv");
  summary << "scheme,tau,completed,max_err_pl,max_err_sa,max_energy_rel_err\n";
  summary.precision(10);
  for (double tau : c.taus) {
    for (const SchemeConfig& s : schemes_of(c, tau)) {
      const MmsOutcome o = run_mms(s, c.mesh, c.degree, c.final_time, true);
      const std::string tag = scheme_name(s) + "_tau" + fmt(tau);
      auto errs = open_out(fs::path(c.output_dir) / ("errors_" + tag + ".csv"));
      o.series.write_csv(errs);
      if (!o.ledger.rows().empty()) {
        auto energy = open_out(fs::path(c.output_dir) / ("energy_" + tag + ".csv"));
        o.ledger.write_csv(energy);
      }
      summary << scheme_name(s) << ',' << tau << ',' << o.run.completed() << ',' << o.series.max_err_p() << ','
              << o.series.max_err_s() << ',' << o.series.max_energy_rel_err() << '\n';
      log << tag << (o.run.completed() ? " completed" : " failed: " + std::string(o.run.failure->what())) << '\n';
    }
  }
  return 0;
}

int cmd_q5spot(const RunConfig& c, std::ostream& log) {
  validate_config(c);
  prepare_dir(c);
  const fs::path dir(c.output_dir);
  {
    auto space = q5spot_space(c.mesh, c.degree);
    log << "q5spot mesh " << c.mesh << "x" << c.mesh << ": " << space->num_cells() << " cells, corner squares "
        << space->mesh().corner_cut << " m\n";
    if (c.write_vtk) {
      auto out = open_out(dir / "mesh.vtk");
      write_mesh_vtk(out, space->mesh());
    }
  }
  auto summary = open_out(dir / "summary.csv");
  summary << "scheme,tau,outcome,steps,mean_iterations,min_sa,max_sa\n";
  summary.precision(10);
  const std::vector<double> snapshot_times = {250.0, 500.0, 750.0};
  for (double tau : c.taus) {
    for (const SchemeConfig& s : schemes_of(c, tau)) {
      const std::string tag = scheme_name(s) + "_tau" + fmt(tau);
      std::shared_ptr<const FeSpace> space;
      const SnapshotFn snap = [&](double t, const Field& p, const Field& sa) {
        if (!space) space = q5spot_space(c.mesh, c.degree);
        const bool initial = t == 0.0;
        bool hit = false;
        for (double ts : snapshot_times) hit = hit || std::abs(t - ts) < 0.5 * tau;
        if (!c.write_vtk || !(initial || hit)) return;
        auto out = open_out(dir / ("snapshot_" + tag + "_t" + fmt(std::round(t)) + ".vtk"));
        write_fields_vtk(out, *space, {{"p_l", &p}, {"s_a", &sa}});
      };
      const Q5Outcome o = run_q5spot(s, c.mesh, c.degree, c.final_time, snap);
      summary << o.scheme << ',' << tau << ',' << (o.completed ? "completed" : "blew-up") << ',' << o.steps << ','
              << o.mean_iterations << ',' << o.min_s << ',' << o.max_s << '\n';
      if (o.completed) {
        if (!space) space = q5spot_space(c.mesh, c.degree);
        auto diag = open_out(dir / ("diagonal_" + tag + ".csv"));
        diag << "x,s_a\n";
        diag.precision(10);
        std::vector<std::pair<double, double>> pts;
        for (Index i = 0; i < space->num_dofs(); ++i) {
          const double x = space->dof_coordinates()(0, i), y = space->dof_coordinates()(1, i);
          if (std::abs(x - y) < 1e-9) pts.emplace_back(x, o.final_s[i]);
        }
        std::sort(pts.begin(), pts.end());
        for (const auto& [x, v] : pts) diag << x << ',' << v << '\n';
      }
      log << tag << ' ' << (o.completed ? "completed" : "blew up: " + o.failure) << ", mean iterations "
          << o.mean_iterations << '\n';
    }
  }
  return 0;
}

int cmd_run(const RunConfig& c, std::ostream& log) {
  validate_config(c);
  prepare_dir(c);
  const fs::path dir(c.output_dir);
  SchemeConfig scheme = parse_scheme(c.scheme, c.tau);
  scheme.tol = c.tol;
  scheme.max_iters = c.max_iters;

  std::shared_ptr<const FeSpace> space;
  std::shared_ptr<const ManufacturedCase> mms;
  Problem problem;
  Field p0, s0;
  if (c.problem == "mms") {
    mms = std::make_shared<const ManufacturedCase>(c.final_time);
    space = unit_square_space(c.mesh, c.degree);
    problem = make_mms_problem(space, mms);
    p0 = space->interpolate([&](double x, double y) { return mms->pressure(x, y, 0.0); });
    s0 = space->interpolate([&](double x, double y) { return mms->saturation(x, y, 0.0); });
  } else if (c.problem == "relax") {
    space = relax_space(c.mesh, c.degree);
    problem = make_relax_problem(space);
    p0 = Field::Zero(space->num_dofs());
    s0 = relax_initial_saturation(*space);
  } else {
    space = q5spot_space(c.mesh, c.degree);
    problem = make_q5spot_problem(space);
    p0 = Field::Constant(space->num_dofs(), kQ5Outflow);
    s0 = Field::Constant(space->num_dofs(), kQ5InitialSaturation);
  }
  Stepper stepper(problem, scheme);

  EnergyLedger ledger;
  ErrorSeries series;
  std::vector<double> wall;
  auto last = std::chrono::steady_clock::now();
  const auto observer = [&](const StepRecord& rec) {
    const auto now = std::chrono::steady_clock::now();
    wall.push_back(std::chrono::duration<double>(now - last).count());
    last = now;
    if (mms) series.samples.push_back(series_sample(*space, *mms, rec));
    const bool midpoint = scheme.kind == SchemeKind::Theta && scheme.theta == 0.5;
    if (midpoint && rec.p_theta) {
      const double t_mid = rec.report.t - rec.tau + rec.theta * rec.tau;
      if (auto row = energy_balance_row(problem, *rec.p_theta, *rec.s_old, *rec.s_new, rec.tau, t_mid, rec.report.step))
        ledger.add(*row);
    }
  };
  RunResult r;
  try {
    r = run(stepper, p0, s0, 0.0, c.final_time, observer);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("key 'final_time': ") + e.what());
  }

  {
    auto out = open_out(dir / "steps.csv");
    write_step_log(out, r.reports, c.timing ? &wall : nullptr);
  }
  if (!ledger.rows().empty()) {
    auto out = open_out(dir / "energy.csv");
    ledger.write_csv(out);
  }
  if (mms) {
    auto out = open_out(dir / "errors.csv");
    series.write_csv(out);
  }
  if (c.write_vtk && r.completed()) {
    auto out = open_out(dir / "final.vtk");
    write_fields_vtk(out, *space, {{"p_l", &r.final_state.p}, {"s_a", &r.final_state.s}});
  }
  if (!r.completed()) {
    log << "run failed: " << r.failure->what() << '\n';
    return 1;
  }
  log << scheme_name(scheme) << " completed " << r.reports.size() << " steps, mean iterations "
      << mean_iterations(r.reports) << '\n';
  return 0;
}

int dispatch(const RunConfig& c, std::ostream& log) {
  if (c.scenario == "converge") return cmd_converge(c, log);
  if (c.scenario == "longtime") return cmd_longtime(c, log);
  if (c.scenario == "q5spot") return cmd_q5spot(c, log);
  return cmd_run(c, log);
}

}  // namespace tpflow
