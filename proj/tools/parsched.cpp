#include <parsched/compare.hpp>
#include <parsched/region_io.hpp>
#include <parsched/system_io.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using namespace parsched;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kNegative = 1; // not schedulable, soundness violation, empty projection
constexpr int kInputError = 2;
constexpr int kFailure = 3; // anything unexpected

struct InputError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

struct Options {
	std::string system_path;
	std::string out_path;
	std::string format = "text";
	std::string point;
	std::string var;
	std::string x, y;
	std::optional<std::int64_t> xmin, xmax, ymin, ymax;
	std::int64_t step = 1;
	std::int64_t horizon = 0;
	bool explain = false;
	bool adversarial = false;
	bool shifted_points = false;
	unsigned threads = 0;
};

SystemSpec load_system(const std::string& path)
{
	std::ifstream in(path);
	if (!in)
		throw InputError("cannot open system file '" + path + "'");
	std::stringstream buf;
	buf << in.rdbuf();
	return parse_system(buf.str());
}

ParamVar free_var(const SystemSpec& sys, const std::string& name)
{
	auto v = parse_param_var(name);
	if (!v)
		throw InputError("bad variable name '" + name + "'");
	if (!is_free_param(sys, *v))
		throw InputError(to_string(*v) + " is not a free parameter of the system");
	return *v;
}

ConcretePoint load_point(const SystemSpec& sys, const std::string& text)
{
	ConcretePoint pt;
	try {
		pt = parse_point(text);
	} catch (const PointSyntaxError& e) {
		throw InputError(e.what());
	}
	for (const auto& [v, value] : pt)
		if (!is_free_param(sys, v))
			throw InputError(to_string(v) + " is not a free parameter of the system");
	return pt;
}

void require_format(const Options& o, std::initializer_list<const char*> allowed)
{
	for (const char* f : allowed)
		if (o.format == f)
			return;
	throw InputError("format '" + o.format + "' not supported by this command");
}

GridSpec grid_of(const SystemSpec& sys, const Options& o)
{
	if (o.x.empty() || o.y.empty())
		throw InputError("--x and --y are required");
	if (!o.xmax || !o.ymax)
		throw InputError("unbounded grid: --xmax and --ymax are required");
	if (o.step <= 0)
		throw InputError("--step must be positive");
	GridSpec g;
	g.x = free_var(sys, o.x);
	g.y = free_var(sys, o.y);
	if (g.x == g.y)
		throw InputError("--x and --y must differ");
	g.xmin = o.xmin.value_or(0);
	g.ymin = o.ymin.value_or(0);
	g.xmax = *o.xmax;
	g.ymax = *o.ymax;
	g.step = o.step;
	return g;
}

AnalysisOptions analysis_of(const Options& o)
{
	AnalysisOptions a;
	a.jitter_shifted_points = o.shifted_points;
	return a;
}

struct Output {
	std::string text;
	int status = kOk;
};

Output run_analyze(const Options& o)
{
	require_format(o, {"text", "structured"});
	const SystemSpec sys = load_system(o.system_path);
	const Region r = build_system_region(sys, analysis_of(o)).flatten();
	return {o.format == "text" ? format_region_text(r, o.explain) : format_region_json(r, o.explain),
	        r.has_no_disjuncts() ? kNegative : kOk};
}

// Unassigned deadlines and jitters are existentially quantified.
Output run_query(const Options& o)
{
	require_format(o, {"text"});
	const SystemSpec sys = load_system(o.system_path);
	const ConcretePoint pt = load_point(sys, o.point);
	for (const auto& v : free_params(sys))
		if (v.kind == ParamKind::C && !pt.count(v))
			throw InputError(to_string(v) + " needs a value in --point");
	const SystemRegion sr = build_system_region(sys, analysis_of(o));
	std::set<ParamVar> keep;
	for (const auto& [v, value] : pt)
		keep.insert(v);
	const bool ok = keep.size() == sr.var_index.size() ? sr.contains(pt) : contains(schedulability_slice(sr, keep), pt);
	return {ok ? "SCHEDULABLE\n" : "NOT SCHEDULABLE\n", ok ? kOk : kNegative};
}

std::string slice_csv(const GridSpec& g, const std::vector<bool>& verdicts)
{
	std::ostringstream os;
	os << to_string(g.x) << ',' << to_string(g.y) << ",schedulable\n";
	const auto xs = grid_axis(g.xmin, g.xmax, g.step);
	std::size_t i = 0;
	for (auto y : grid_axis(g.ymin, g.ymax, g.step))
		for (auto x : xs)
			os << x << ',' << y << ',' << (verdicts[i++] ? 1 : 0) << '\n';
	return os.str();
}

// One square per grid point, y growing upwards.
std::string slice_svg(const GridSpec& g, const std::vector<bool>& verdicts)
{
	const auto xs = grid_axis(g.xmin, g.xmax, g.step);
	const auto ys = grid_axis(g.ymin, g.ymax, g.step);
	constexpr int cell = 10, margin = 40;
	const auto w = static_cast<long>(xs.size()) * cell, h = static_cast<long>(ys.size()) * cell;
	std::ostringstream os;
	os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w + 2 * margin << "\" height=\"" << h + 2 * margin
	   << "\">\n";
	os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << w << "\" height=\"" << h
	   << "\" fill=\"#f4f4f4\" stroke=\"#000\"/>\n";
	std::size_t i = 0;
	for (std::size_t r = 0; r < ys.size(); ++r)
		for (std::size_t c = 0; c < xs.size(); ++c, ++i)
			if (verdicts[i])
				os << "<rect x=\"" << margin + static_cast<long>(c) * cell << "\" y=\""
				   << margin + h - static_cast<long>(r + 1) * cell << "\" width=\"" << cell << "\" height=\"" << cell
				   << "\" fill=\"#3a9a4a\"/>\n";
	os << "<text x=\"" << margin + w / 2 << "\" y=\"" << h + 2 * margin - 10 << "\" text-anchor=\"middle\">"
	   << to_string(g.x) << " [" << g.xmin << ", " << g.xmax << "]</text>\n";
	os << "<text x=\"12\" y=\"" << margin + h / 2 << "\" transform=\"rotate(-90 12 " << margin + h / 2
	   << ")\" text-anchor=\"middle\">" << to_string(g.y) << " [" << g.ymin << ", " << g.ymax << "]</text>\n";
	os << "</svg>\n";
	return os.str();
}

Output run_slice(const Options& o)
{
	Options opt = o;
	if (opt.format == "text")
		opt.format = "csv";
	require_format(opt, {"csv", "svg", "structured"});
	const SystemSpec sys = load_system(o.system_path);
	if (opt.format == "structured") {
		if (o.x.empty() || o.y.empty())
			throw InputError("--x and --y are required");
		const std::set<ParamVar> keep{free_var(sys, o.x), free_var(sys, o.y)};
		return {format_region_json(schedulability_slice(build_system_region(sys, analysis_of(o)), keep), o.explain)};
	}
	const GridSpec g = grid_of(sys, o);
	const Region slice = schedulability_slice(build_system_region(sys, analysis_of(o)), {g.x, g.y});
	const auto verdicts = slice_verdicts(slice, g);
	return {opt.format == "csv" ? slice_csv(g, verdicts) : slice_svg(g, verdicts)};
}

// Interval of one variable; --point fixes others before projecting.
Output run_project(const Options& o)
{
	require_format(o, {"text"});
	const SystemSpec sys = load_system(o.system_path);
	if (o.var.empty())
		throw InputError("--var is required");
	const ParamVar v = free_var(sys, o.var);
	const ConcretePoint pt = load_point(sys, o.point);
	if (pt.count(v))
		throw InputError(to_string(v) + " cannot be both projected and fixed");
	SystemRegion sr = build_system_region(sys, analysis_of(o));
	if (!pt.empty()) {
		for (auto& b : sr.blocks)
			b = substitute(b, pt);
	}
	const Region slice = schedulability_slice(sr, {v});
	try {
		return {format_interval(o.var, var_interval(slice, v)) + "\n"};
	} catch (const EmptyRegion&) {
		return {o.var + " in empty\n", kNegative};
	}
}

Output run_simulate(const Options& o)
{
	require_format(o, {"text", "structured"});
	const SystemSpec sys = load_system(o.system_path);
	const ConcretePoint pt = load_point(sys, o.point);
	const std::int64_t horizon = o.horizon > 0 ? o.horizon : default_horizon(sys);
	SimResult r;
	try {
		r = o.adversarial ? worst_case_blocking_mode(sys, pt, horizon) : simulate(sys, pt, horizon);
	} catch (const MissingAssignment& e) {
		throw InputError(std::string(e.what()) + " (use --point)");
	}
	return {o.format == "text" ? format_trace_text(r) : format_trace_json(r), r.schedulable ? kOk : kNegative};
}

Output run_compare(const Options& o)
{
	require_format(o, {"text", "structured"});
	const SystemSpec sys = load_system(o.system_path);
	const GridSpec g = grid_of(sys, o);
	CompareOptions opts;
	opts.horizon = o.horizon;
	opts.adversarial_blocking = o.adversarial;
	opts.threads = o.threads;
	opts.analysis = analysis_of(o);
	CompareReport rep;
	try {
		rep = grid_compare(sys, g, opts);
	} catch (const std::invalid_argument& e) {
		throw InputError(e.what());
	}
	return {o.format == "text" ? format_report_text(rep, g) : format_report_json(rep, g),
	        rep.violations ? kNegative : kOk};
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Parametric schedulability analysis of distributed fixed-priority systems"};
	app.require_subcommand(1);
	Options o;

	auto common = [&](CLI::App* sub) {
		sub->add_option("--system", o.system_path, "System description file")->required();
		sub->add_option("--out", o.out_path, "Write the result to this file");
		sub->add_option("--format", o.format, "text | structured | csv | svg")
		    ->check(CLI::IsMember({"text", "structured", "csv", "svg"}));
		sub->add_flag("--jitter-shifted-points", o.shifted_points,
		              "Also try interference vectors shifted by the maximum deadlines");
	};
	auto grid = [&](CLI::App* sub) {
		sub->add_option("--x", o.x, "Horizontal variable, e.g. C[tau1]");
		sub->add_option("--y", o.y, "Vertical variable");
		sub->add_option("--xmin", o.xmin);
		sub->add_option("--xmax", o.xmax);
		sub->add_option("--ymin", o.ymin);
		sub->add_option("--ymax", o.ymax);
		sub->add_option("--step", o.step, "Grid step")->capture_default_str();
	};

	auto* analyze = app.add_subcommand("analyze", "Print the schedulability region");
	common(analyze);
	analyze->add_flag("--explain", o.explain, "Annotate disjuncts with their scheduling points");

	auto* query = app.add_subcommand("query", "Check one parameter point");
	common(query);
	query->add_option("--point", o.point, "VAR=INT,...")->required();

	auto* slice = app.add_subcommand("slice", "Two-variable slice as CSV or SVG");
	common(slice);
	grid(slice);
	slice->add_flag("--explain", o.explain);

	auto* project = app.add_subcommand("project", "Interval of one variable");
	common(project);
	project->add_option("--var", o.var, "Variable to project on")->required();
	project->add_option("--point", o.point, "Fix other variables first");

	auto* sim = app.add_subcommand("simulate", "Run the scheduling simulator");
	common(sim);
	sim->add_option("--point", o.point, "VAR=INT,...");
	sim->add_option("--horizon", o.horizon, "Release window in ticks (default: hyperperiod + max deadline)");
	sim->add_flag("--adversarial-blocking", o.adversarial, "Try every release offset of blocking tasks");

	auto* compare = app.add_subcommand("compare", "Analysis versus simulator on a grid");
	common(compare);
	grid(compare);
	compare->add_option("--horizon", o.horizon);
	compare->add_flag("--adversarial-blocking", o.adversarial);
	compare->add_option("--threads", o.threads, "Worker threads (default: all cores)");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		const int code = app.exit(e);
		return code == 0 ? kOk : kInputError;
	}

	Output out;
	try {
		if (*analyze)
			out = run_analyze(o);
		else if (*query)
			out = run_query(o);
		else if (*slice)
			out = run_slice(o);
		else if (*project)
			out = run_project(o);
		else if (*sim)
			out = run_simulate(o);
		else
			out = run_compare(o);
	} catch (const InputError& e) {
		std::cerr << "error: " << e.what() << '\n';
		return kInputError;
	} catch (const SpecError& e) {
		std::cerr << "error: " << e.what() << '\n';
		return kInputError;
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << '\n';
		return kFailure;
	}

	if (o.out_path.empty()) {
		std::cout << out.text;
	} else {
		std::ofstream f(o.out_path);
		if (!f) {
			std::cerr << "error: cannot write '" << o.out_path << "'\n";
			return kInputError;
		}
		f << out.text;
	}
	return out.status;
}
