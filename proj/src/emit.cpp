#include "irtsmooth/emit.hpp"

#include "irtsmooth/error.hpp"
#include "irtsmooth/svg.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace irtsmooth {

namespace {

constexpr const char* kModule = "cli-io";
constexpr std::array<double, 5> kGuideProbs = { 0.05, 0.25, 0.5, 0.75, 0.95 };

using nlohmann::json;

std::string csv_header()
{
  return "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
}

json number_or_null(double v)
{
  return std::isfinite(v) ? json(v) : json(nullptr);
}

std::string axis_label(AxisType axis)
{
  return axis == AxisType::scores ? "Expected score" : "Theta";
}

std::string option_name(const Model& m, std::size_t item, int l)
{
  const auto& data = m.prepared.data;
  if (data.has_missing_option(item) && l == data.option_count(item))
    return "missing";
  return "option " + std::to_string(l + 1);
}

bool is_keyed(const Model& m, std::size_t item, int l)
{
  const auto& scheme = m.prepared.scheme;
  return scheme.formats[item] == ItemFormat::multiple_choice &&
         scheme.weights[item][static_cast<std::size_t>(l)] > 0.0;
}

// Theta quantiles of the subjects, expressed on the configured axis.
std::vector<double> guide_positions(const Model& m)
{
  auto q = sample_quantiles(m.ability.thetas, kGuideProbs);
  if (m.config.axis == AxisType::scores)
    for (double& v : q)
      v = interpolate(m.ets, m.curves.points, v);
  return q;
}

std::string guide_label(double p)
{
  return std::to_string(static_cast<int>(std::lround(p * 100))) + "%";
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index c)
{
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    out[static_cast<std::size_t>(r)] = m(r, c);
  return out;
}

// ---- data artifacts ----

std::string occ_csv(const Model& m, std::size_t j)
{
  const auto& item = m.curves.items[j];
  const auto m_j = item.occ.cols();
  std::string out = csv_header() + "theta,expected_score";
  for (Eigen::Index l = 0; l < m_j; ++l)
    out += ",p" + std::to_string(l + 1);
  for (Eigen::Index l = 0; l < m_j; ++l)
    out += ",se" + std::to_string(l + 1);
  out += '\n';
  for (std::size_t s = 0; s < m.curves.n_points(); ++s) {
    const auto r = static_cast<Eigen::Index>(s);
    out += csv_number(m.curves.points[s]) + "," + csv_number(m.ets[s]);
    for (Eigen::Index l = 0; l < m_j; ++l)
      out += "," + csv_number(item.occ(r, l));
    for (Eigen::Index l = 0; l < m_j; ++l)
      out += "," + csv_number(item.std_errors(r, l));
    out += '\n';
  }
  return out;
}

std::string eis_csv(const Model& m)
{
  const double z = m.confidence.z;
  std::string out =
    csv_header() + "item,theta,expected_score,eis,se,lower,upper\n";
  const auto& labels = m.prepared.data.item_labels();
  for (std::size_t j = 0; j < labels.size(); ++j)
    for (std::size_t s = 0; s < m.curves.n_points(); ++s) {
      const double e = m.eis[j][s];
      const double se = m.eis_se[j][s];
      out += labels[j] + "," + csv_number(m.curves.points[s]) + "," +
             csv_number(m.ets[s]) + "," + csv_number(e) + "," +
             csv_number(se) + "," + csv_number(e - z * se) + "," +
             csv_number(e + z * se) + "\n";
    }
  return out;
}

std::string test_csv(const Model& m)
{
  std::string out = csv_header() + "theta,ets,sd\n";
  for (std::size_t s = 0; s < m.curves.n_points(); ++s)
    out += csv_number(m.curves.points[s]) + "," + csv_number(m.ets[s]) + "," +
           csv_number(m.score_sd[s]) + "\n";
  return out;
}

std::string subjects_csv(const Model& m)
{
  std::string out = csv_header() +
                    "subject,row,total_score,rank,theta,theta_ml,score_ml,"
                    "floored,status\n";
  for (std::size_t i = 0; i < m.subjects.size(); ++i) {
    const auto& s = m.subjects[i];
    out += std::to_string(i + 1) + "," +
           std::to_string(m.prepared.kept_subjects[i] + 1) + "," +
           csv_number(m.ability.total_scores[i]) + "," +
           csv_number(m.ability.ranks[i]) + "," +
           csv_number(m.ability.thetas[i]) + "," + csv_number(s.theta_ml) +
           "," + csv_number(s.score_ml) + "," + (s.floored ? "1" : "0") +
           "," + (s.error.empty() ? "ok" : "degenerate") + "\n";
  }
  return out;
}

std::vector<int> subject_row(const Model& m, std::size_t i)
{
  std::vector<int> row(m.prepared.data.n_items());
  for (std::size_t j = 0; j < row.size(); ++j)
    row[j] = m.prepared.data.at(i, j);
  return row;
}

std::vector<std::size_t> rcc_subjects(const Model& m)
{
  std::vector<std::size_t> out;
  if (!m.config.subjects.empty()) {
    for (auto s : m.config.subjects)
      out.push_back(s - 1);
  } else {
    for (std::size_t i = 0; i < std::min<std::size_t>(6, m.subjects.size());
         ++i)
      out.push_back(i);
  }
  return out;
}

std::string subjects_json(const Model& m)
{
  json j;
  j["schema_version"] = kSchemaVersion;
  j["subjects"] = json::array();
  for (auto i : rcc_subjects(m)) {
    const auto& s = m.subjects[i];
    json e = { { "subject", i + 1 },
               { "total_score", m.ability.total_scores[i] },
               { "theta", m.ability.thetas[i] },
               { "theta_ml", number_or_null(s.theta_ml) },
               { "score_ml", number_or_null(s.score_ml) },
               { "floored", s.floored } };
    if (s.error.empty())
      e["rcc"] =
        relative_credibility(m.curves, m.ets, subject_row(m, i)).curve;
    else
      e["error"] = s.error;
    j["subjects"].push_back(std::move(e));
  }
  return j.dump(1) + "\n";
}

std::string pca_csv(const Model& m)
{
  std::string out = csv_header() + "item,pc1,pc2\n";
  const auto& labels = m.prepared.data.item_labels();
  for (std::size_t u = 0; u < m.pca_items.size(); ++u) {
    const auto r = static_cast<Eigen::Index>(u);
    out += labels[m.pca_items[u]] + "," + csv_number(m.pca->scores(r, 0)) +
           "," + csv_number(m.pca->scores(r, 1)) + "\n";
  }
  return out;
}

json trajectory_json(const Model& m, const SimplexTrajectory& t)
{
  json j;
  j["item"] = m.prepared.data.item_labels()[t.item];
  json vertices = json::array();
  for (int o : t.options)
    vertices.push_back(option_name(m, t.item, o));
  j["vertices"] = vertices;
  json points = json::array();
  for (Eigen::Index s = 0; s < t.barycentric.rows(); ++s) {
    json p;
    std::vector<double> b, c;
    for (Eigen::Index d = 0; d < t.barycentric.cols(); ++d)
      b.push_back(t.barycentric(s, d));
    for (Eigen::Index d = 0; d < t.cartesian.cols(); ++d)
      c.push_back(t.cartesian(s, d));
    p["theta"] = m.curves.points[static_cast<std::size_t>(s)];
    p["barycentric"] = b;
    p["cartesian"] = c;
    p["band"] = to_string(t.bands[static_cast<std::size_t>(s)]);
    points.push_back(std::move(p));
  }
  j["points"] = std::move(points);
  return j;
}

std::string simplex_json(const Model& m)
{
  json j;
  j["schema_version"] = kSchemaVersion;
  j["triangle"] = json::array();
  for (const auto& t : m.triangles)
    j["triangle"].push_back(trajectory_json(m, t));
  j["tetrahedron"] = json::array();
  for (const auto& t : m.tetrahedra)
    j["tetrahedron"].push_back(trajectory_json(m, t));
  return j.dump(1) + "\n";
}

std::string summary_json(const Model& m)
{
  const auto& data = m.prepared.data;
  const auto& cfg = m.config;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["n_subjects"] = data.n_subjects();
  j["n_items"] = data.n_items();
  j["n_rows_read"] = m.dataset.responses.n_subjects();
  j["dropped_all_missing"] = m.prepared.dropped_all_missing;
  j["dropped_by_policy"] = m.prepared.dropped_by_policy;
  j["imputed_cells"] = m.prepared.imputed_cells;
  j["missing_mode"] = to_string(cfg.missing);
  j["kernel"] = to_string(cfg.kernel);
  j["n_points"] = m.curves.n_points();
  j["distribution"] = cfg.distribution.describe();
  j["alpha"] = m.confidence.alpha;
  j["z"] = m.confidence.z;
  j["axis"] = cfg.axis == AxisType::scores ? "scores" : "distribution";
  json items = json::array();
  for (std::size_t k = 0; k < data.n_items(); ++k) {
    json it;
    it["label"] = data.item_labels()[k];
    it["format"] = to_string(m.prepared.scheme.formats[k]);
    it["options"] = data.total_options(k);
    it["bandwidth"] = m.bandwidths[k];
    it["itemcor"] =
      m.itemcor[k] ? number_or_null(*m.itemcor[k]) : json(nullptr);
    items.push_back(std::move(it));
  }
  j["items"] = std::move(items);
  const auto& scores = m.ability.total_scores;
  json quant = json::object();
  for (double p : kGuideProbs)
    quant[guide_label(p)] = sample_quantile(scores, p);
  j["score_quantiles"] = quant;
  j["grid"] = m.curves.points;
  j["ets"] = m.ets;
  j["sd"] = m.score_sd;
  if (m.density) {
    j["density"]["bandwidth"] = m.density->bandwidth;
    j["density"]["x"] = m.density->x;
    j["density"]["y"] = m.density->density;
  }
  if (m.pca) {
    j["pca"]["explained_variance"] = m.pca->explained_variance;
    std::vector<std::string> extremes;
    for (auto e : m.pca->extreme_items)
      extremes.push_back(data.item_labels()[m.pca_items[e]]);
    j["pca"]["extreme_items"] = extremes;
  }
  json degenerate = json::array();
  for (std::size_t i = 0; i < m.subjects.size(); ++i)
    if (!m.subjects[i].error.empty())
      degenerate.push_back(
        { { "subject", i + 1 }, { "reason", m.subjects[i].error } });
  j["degenerate_subjects"] = std::move(degenerate);
  j["warnings"] = m.warnings;
  return j.dump(1) + "\n";
}

// ---- plots ----

std::string occ_svg(const Model& m, std::size_t j)
{
  const auto& item = m.curves.items[j];
  const auto x = m.axis_values();
  svg::Chart chart("Item " + m.prepared.data.item_labels()[j],
                   axis_label(m.config.axis), "Probability");
  chart.y_range(0.0, 1.0);
  const auto guides = guide_positions(m);
  for (std::size_t g = 0; g < guides.size(); ++g)
    chart.vline(guides[g], "#999999", guide_label(kGuideProbs[g]));
  for (Eigen::Index l = 0; l < item.occ.cols(); ++l) {
    const int li = static_cast<int>(l);
    const bool key = is_keyed(m, j, li);
    chart.line(x, column(item.occ, l),
               key ? std::string(svg::kHighlight)
                   : svg::palette(static_cast<std::size_t>(l)),
               option_name(m, j, li), false, key ? 2.5 : 1.5);
  }
  return chart.render();
}

std::string eis_svg(const Model& m, std::size_t j)
{
  const auto x = m.axis_values();
  const auto& scheme = m.prepared.scheme;
  svg::Chart chart("Item " + m.prepared.data.item_labels()[j],
                   axis_label(m.config.axis), "Expected item score");
  chart.y_range(scheme.min_weight(j), scheme.max_weight(j));
  const auto band = confidence_band(m.eis[j], m.eis_se[j], m.confidence.z);
  chart.band(x, band.lower, band.upper, "#1f4fd8", 0.2);
  chart.line(x, m.eis[j], std::string(svg::kHighlight), "EIS");
  chart.points(x,
               grouped_item_scores(m.grid, m.prepared.data, scheme, j),
               "#000000", 2.5);
  return chart.render();
}

std::string rcc_svg(const Model& m, std::size_t i)
{
  const auto x = m.axis_values();
  const auto rcc = relative_credibility(m.curves, m.ets, subject_row(m, i));
  svg::Chart chart("Subject " + std::to_string(i + 1),
                   axis_label(m.config.axis), "Relative credibility");
  chart.y_range(0.0, 1.0);
  chart.line(x, rcc.curve, std::string(svg::kHighlight));
  chart.vline(x[rcc.ml_index], "#d62728", "ML");
  return chart.render();
}

const char* band_color(TraitBand b)
{
  switch (b) {
    case TraitBand::low:
      return "#d62728";
    case TraitBand::medium:
      return "#2ca02c";
    case TraitBand::high:
      return "#1f4fd8";
  }
  return "#000000";
}

void draw_markers(svg::Document& doc, const SimplexTrajectory& t,
                  const std::vector<std::pair<double, double>>& px)
{
  doc.polyline(px, "#555555", 1.0);
  for (std::size_t s = 0; s < px.size(); ++s)
    doc.circle(px[s].first, px[s].second, 3.0, band_color(t.bands[s]));
}

std::string triangle_svg(const Model& m, const SimplexTrajectory& t)
{
  svg::Document doc(560.0, 520.0);
  constexpr double scale = 400.0;
  const auto map = [&](double x, double y) {
    return std::pair{ 49.0 + x * scale, 470.0 - y * scale };
  };
  doc.text(280.0, 28.0, "Item " + m.prepared.data.item_labels()[t.item],
           "middle", 15.0);
  const Eigen::MatrixXd v = simplex_vertices(3);
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3;
    const auto pa = map(v(a, 0), v(a, 1));
    const auto pb = map(v(b, 0), v(b, 1));
    doc.line(pa.first, pa.second, pb.first, pb.second, "#000000", 1.5);
  }
  const std::array<std::pair<double, double>, 3> offsets = {
    std::pair{ -8.0, 18.0 }, std::pair{ 8.0, 18.0 }, std::pair{ 0.0, -10.0 }
  };
  const std::array<const char*, 3> anchors = { "end", "start", "middle" };
  for (int a = 0; a < 3; ++a) {
    const auto p = map(v(a, 0), v(a, 1));
    doc.text(p.first + offsets[static_cast<std::size_t>(a)].first,
             p.second + offsets[static_cast<std::size_t>(a)].second,
             option_name(m, t.item, t.options[static_cast<std::size_t>(a)]),
             anchors[static_cast<std::size_t>(a)]);
  }
  std::vector<std::pair<double, double>> px;
  for (Eigen::Index s = 0; s < t.cartesian.rows(); ++s)
    px.push_back(map(t.cartesian(s, 0), t.cartesian(s, 1)));
  draw_markers(doc, t, px);
  return doc.render();
}

// Fixed camera: rotate 30 degrees about the vertical axis, then tilt 20
// degrees toward the viewer.
std::pair<double, double> project(double x, double y, double z)
{
  constexpr double az = std::numbers::pi / 6.0;
  constexpr double el = std::numbers::pi / 9.0;
  const double xr = x * std::cos(az) - y * std::sin(az);
  const double yr = x * std::sin(az) + y * std::cos(az);
  return { xr, z * std::cos(el) - yr * std::sin(el) };
}

std::string tetrahedron_svg(const Model& m, const SimplexTrajectory& t)
{
  svg::Document doc(560.0, 520.0);
  constexpr double scale = 300.0;
  const auto map = [&](double x, double y, double z) {
    const auto [u, w] = project(x, y, z);
    return std::pair{ 280.0 + u * scale, 400.0 - w * scale };
  };
  doc.text(280.0, 28.0, "Item " + m.prepared.data.item_labels()[t.item],
           "middle", 15.0);
  const Eigen::MatrixXd v = simplex_vertices(4);
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      const auto pa = map(v(a, 0), v(a, 1), v(a, 2));
      const auto pb = map(v(b, 0), v(b, 1), v(b, 2));
      doc.line(pa.first, pa.second, pb.first, pb.second, "#000000", 1.0);
    }
  for (int a = 0; a < 4; ++a) {
    const auto p = map(v(a, 0), v(a, 1), v(a, 2));
    doc.text(p.first + 6.0, p.second - 6.0,
             option_name(m, t.item, t.options[static_cast<std::size_t>(a)]));
  }
  std::vector<std::pair<double, double>> px;
  for (Eigen::Index s = 0; s < t.cartesian.rows(); ++s)
    px.push_back(map(t.cartesian(s, 0), t.cartesian(s, 1), t.cartesian(s, 2)));
  draw_markers(doc, t, px);
  return doc.render();
}

std::string pca_svg(const Model& m)
{
  svg::Chart chart("Principal components", "Component 1 (difficulty)",
                   "Component 2 (discrimination)");
  const auto pc1 = column(m.pca->scores, 0);
  const auto pc2 = column(m.pca->scores, 1);
  chart.points(pc1, pc2, std::string(svg::kHighlight), 3.0);
  for (std::size_t u = 0; u < m.pca_items.size(); ++u)
    chart.annotate(pc1[u], pc2[u], m.prepared.data.item_labels()[m.pca_items[u]]);
  return chart.render();
}

std::string ets_svg(const Model& m)
{
  svg::Chart chart("Expected total score", "Theta", "Expected score");
  chart.line(m.curves.points, m.ets, std::string(svg::kHighlight));
  return chart.render();
}

std::string sd_svg(const Model& m)
{
  svg::Chart chart("Standard deviation of the score",
                   axis_label(m.config.axis), "Standard deviation");
  chart.line(m.axis_values(), m.score_sd, std::string(svg::kHighlight));
  return chart.render();
}

std::string density_svg(const ScoreDensity& d, const std::string& title)
{
  svg::Chart chart(title, "Total score", "Density");
  chart.line(d.x, d.density, std::string(svg::kHighlight));
  return chart.render();
}

// ---- DIF ----

std::vector<double> dif_axis(const Model& m, const std::vector<double>& ets)
{
  return m.config.axis == AxisType::scores ? ets : m.curves.points;
}

void write_dif(const Model& m, ArtifactWriter& w)
{
  const auto& dif = *m.dif;
  const auto& labels = m.prepared.data.item_labels();
  json groups;
  groups["schema_version"] = kSchemaVersion;
  groups["groups"] = json::array();
  for (const auto& g : dif.groups)
    groups["groups"].push_back({ { "label", g.label },
                                 { "size", g.subjects.size() },
                                 { "bandwidths", g.bandwidths } });
  groups["dropped"] = json::array();
  for (const auto& d : dif.dropped)
    groups["dropped"].push_back({ { "label", d.label }, { "size", d.size } });
  json dens = json::object();
  for (const auto& g : dif.groups)
    dens[g.label] = { { "bandwidth", g.density.bandwidth },
                      { "x", g.density.x },
                      { "y", g.density.density } };
  groups["densities"] = dens;
  w.write("dif/groups.json", groups.dump(1) + "\n");

  for (std::size_t j = 0; j < labels.size(); ++j) {
    std::string out = csv_header() + "group,theta,option,probability\n";
    for (const auto& g : dif.groups) {
      const auto& occ = g.curves.items[j].occ;
      for (Eigen::Index l = 0; l < occ.cols(); ++l)
        for (Eigen::Index s = 0; s < occ.rows(); ++s)
          out += g.label + "," +
                 csv_number(m.curves.points[static_cast<std::size_t>(s)]) +
                 "," + std::to_string(l + 1) + "," + csv_number(occ(s, l)) +
                 "\n";
    }
    w.write("dif/occ/item_" + safe_name(labels[j]) + ".csv", out);
  }

  std::string eis = csv_header() + "group,item,theta,eis\n";
  std::string ets = csv_header() + "group,theta,ets\n";
  for (const auto& g : dif.groups) {
    for (std::size_t j = 0; j < labels.size(); ++j)
      for (std::size_t s = 0; s < g.ets.size(); ++s)
        eis += g.label + "," + labels[j] + "," +
               csv_number(m.curves.points[s]) + "," +
               csv_number(g.eis[j][s]) + "\n";
    for (std::size_t s = 0; s < g.ets.size(); ++s)
      ets += g.label + "," + csv_number(m.curves.points[s]) + "," +
             csv_number(g.ets[s]) + "\n";
  }
  w.write("dif/eis.csv", eis);
  w.write("dif/ets.csv", ets);

  for (const auto& qq : dif.qq) {
    const auto& a = dif.groups[qq.first].label;
    const auto& b = dif.groups[qq.second].label;
    std::string out = csv_header() + "prob," + a + "," + b + "\n";
    for (std::size_t t = 0; t < qq.probs.size(); ++t)
      out += csv_number(qq.probs[t]) + "," + csv_number(qq.first_quantiles[t]) +
             "," + csv_number(qq.second_quantiles[t]) + "\n";
    w.write("dif/qq_" + safe_name(a) + "_" + safe_name(b) + ".csv", out);
  }

  const auto& plots = m.config.plots;
  const auto pooled_x = m.axis_values();
  for (auto j : m.selected_items) {
    const std::string name = safe_name(labels[j]);
    if (plots.count("dif-occ")) {
      svg::Chart chart("Item " + labels[j] + " by group",
                       axis_label(m.config.axis), "Probability");
      chart.y_range(0.0, 1.0);
      const auto& pooled = m.curves.items[j].occ;
      for (Eigen::Index l = 0; l < pooled.cols(); ++l)
        chart.line(pooled_x, column(pooled, l), "#000000",
                   l == 0 ? "overall" : "", true, 1.0);
      for (std::size_t g = 0; g < dif.groups.size(); ++g) {
        const auto& occ = dif.groups[g].curves.items[j].occ;
        const auto gx = dif_axis(m, dif.groups[g].ets);
        for (Eigen::Index l = 0; l < occ.cols(); ++l)
          chart.line(gx, column(occ, l), svg::palette(g),
                     l == 0 ? dif.groups[g].label : "");
      }
      w.write("plots/dif_occ_" + name + ".svg", chart.render());
    }
    if (plots.count("dif-eis")) {
      svg::Chart chart("Item " + labels[j] + " by group",
                       axis_label(m.config.axis), "Expected item score");
      chart.line(pooled_x, m.eis[j], "#000000", "overall", true, 1.0);
      for (std::size_t g = 0; g < dif.groups.size(); ++g)
        chart.line(dif_axis(m, dif.groups[g].ets), dif.groups[g].eis[j],
                   svg::palette(g), dif.groups[g].label);
      w.write("plots/dif_eis_" + name + ".svg", chart.render());
    }
  }
  if (plots.count("dif-ets")) {
    svg::Chart chart("Expected total score by group", "Theta",
                     "Expected score");
    chart.line(m.curves.points, m.ets, "#000000", "overall", true, 1.0);
    for (std::size_t g = 0; g < dif.groups.size(); ++g)
      chart.line(m.curves.points, dif.groups[g].ets, svg::palette(g),
                 dif.groups[g].label);
    w.write("plots/dif_ets.svg", chart.render());
  }
  if (plots.count("dif-qq"))
    for (const auto& qq : dif.qq) {
      const auto& a = dif.groups[qq.first].label;
      const auto& b = dif.groups[qq.second].label;
      svg::Chart chart("Expected score QQ: " + a + " vs " + b, a, b);
      const double lo = std::min(qq.first_quantiles.front(),
                                 qq.second_quantiles.front());
      const double hi =
        std::max(qq.first_quantiles.back(), qq.second_quantiles.back());
      const std::array<double, 2> diag = { lo, hi };
      chart.line(diag, diag, "#999999", "", true, 1.0);
      chart.points(qq.first_quantiles, qq.second_quantiles,
                   std::string(svg::kHighlight));
      w.write("plots/dif_qq_" + safe_name(a) + "_" + safe_name(b) + ".svg",
              chart.render());
    }
  if (plots.count("dif-density")) {
    svg::Chart chart("Total score density by group", "Total score",
                     "Density");
    for (std::size_t g = 0; g < dif.groups.size(); ++g)
      chart.line(dif.groups[g].density.x, dif.groups[g].density.density,
                 svg::palette(g), dif.groups[g].label);
    w.write("plots/dif_density.svg", chart.render());
  }
}

} // namespace

std::string sha256_hex(std::string_view bytes)
{
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(),
                 nullptr) != 1)
    throw Error(ErrorKind::io, kModule, "sha256", "digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

std::string csv_number(double value)
{
  if (!std::isfinite(value))
    return "NA";
  if (value == 0.0)
    value = 0.0;
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return { buf.data(), ptr };
}

std::string safe_name(std::string_view label)
{
  std::string out;
  for (char c : label)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
            c == '_' || c == '.')
             ? c
             : '_';
  return out.empty() ? "_" : out;
}

ArtifactWriter::ArtifactWriter(std::string root)
{
  manifest_.root = std::move(root);
  std::error_code ec;
  std::filesystem::create_directories(manifest_.root, ec);
  if (ec)
    throw Error(ErrorKind::io, kModule, "write",
                "cannot create '" + manifest_.root + "': " + ec.message());
}

void ArtifactWriter::write(const std::string& relative,
                           std::string_view content)
{
  const auto path = std::filesystem::path(manifest_.root) / relative;
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out)
    throw Error(ErrorKind::io, kModule, "write",
                "cannot write '" + path.string() + "'");
  manifest_.files.push_back({ relative, content.size(), sha256_hex(content) });
}

std::string manifest_json(const Manifest& manifest)
{
  json j;
  j["schema_version"] = kSchemaVersion;
  j["files"] = json::array();
  for (const auto& f : manifest.files)
    j["files"].push_back(
      { { "path", f.path }, { "bytes", f.bytes }, { "sha256", f.sha256 } });
  return j.dump(1) + "\n";
}

Manifest ArtifactWriter::finish()
{
  std::sort(manifest_.files.begin(), manifest_.files.end(),
            [](const auto& a, const auto& b) { return a.path < b.path; });
  const auto text = manifest_json(manifest_);
  const auto path = std::filesystem::path(manifest_.root) / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out)
    throw Error(ErrorKind::io, kModule, "write",
                "cannot write '" + path.string() + "'");
  return manifest_;
}

Manifest write_analysis(const Model& m, const std::string& out_dir)
{
  ArtifactWriter w(out_dir);
  const auto& labels = m.prepared.data.item_labels();
  for (std::size_t j = 0; j < labels.size(); ++j)
    w.write("occ/item_" + safe_name(labels[j]) + ".csv", occ_csv(m, j));
  w.write("eis.csv", eis_csv(m));
  w.write("test.csv", test_csv(m));
  w.write("subjects.csv", subjects_csv(m));
  w.write("summary.json", summary_json(m));
  if (!m.config.subjects.empty() || m.config.plots.count("rcc"))
    w.write("subjects.json", subjects_json(m));
  if (m.pca)
    w.write("pca.csv", pca_csv(m));
  if (!m.triangles.empty() || !m.tetrahedra.empty())
    w.write("simplex.json", simplex_json(m));

  const auto& plots = m.config.plots;
  for (auto j : m.selected_items) {
    const std::string name = safe_name(labels[j]);
    if (plots.count("occ"))
      w.write("plots/occ_" + name + ".svg", occ_svg(m, j));
    if (plots.count("eis"))
      w.write("plots/eis_" + name + ".svg", eis_svg(m, j));
  }
  if (plots.count("rcc"))
    for (auto i : rcc_subjects(m))
      if (m.subjects[i].error.empty())
        w.write("plots/rcc_subject_" + std::to_string(i + 1) + ".svg",
                rcc_svg(m, i));
  if (plots.count("triangle"))
    for (const auto& t : m.triangles)
      w.write("plots/triangle_" + safe_name(labels[t.item]) + ".svg",
              triangle_svg(m, t));
  if (plots.count("tetrahedron"))
    for (const auto& t : m.tetrahedra)
      w.write("plots/tetrahedron_" + safe_name(labels[t.item]) + ".svg",
              tetrahedron_svg(m, t));
  if (plots.count("pca") && m.pca)
    w.write("plots/pca.svg", pca_svg(m));
  if (plots.count("ets"))
    w.write("plots/ets.svg", ets_svg(m));
  if (plots.count("sd"))
    w.write("plots/sd.svg", sd_svg(m));
  if (plots.count("density") && m.density)
    w.write("plots/density.svg", density_svg(*m.density, "Total score density"));
  if (m.dif)
    write_dif(m, w);
  return w.finish();
}

Manifest write_cv_profile(const CvProfile& profile, const std::string& out_dir)
{
  ArtifactWriter w(out_dir);
  std::string out = csv_header() + "item,bandwidth,cv\n";
  json best;
  best["schema_version"] = kSchemaVersion;
  best["items"] = json::array();
  for (std::size_t u = 0; u < profile.labels.size(); ++u) {
    const auto& r = profile.results[u];
    for (std::size_t c = 0; c < profile.candidates.size(); ++c)
      out += profile.labels[u] + "," + csv_number(profile.candidates[c]) +
             "," + (std::isinf(r.cv_values[c]) ? std::string("Inf")
                                               : csv_number(r.cv_values[c])) +
             "\n";
    best["items"].push_back(
      { { "label", profile.labels[u] }, { "bandwidth", r.best_h } });
  }
  w.write("cv.csv", out);
  w.write("cv_best.json", best.dump(1) + "\n");
  return w.finish();
}

std::string responses_csv(const ResponseMatrix& data)
{
  std::string out;
  const auto& labels = data.item_labels();
  for (std::size_t j = 0; j < labels.size(); ++j)
    out += (j ? "," : "") + labels[j];
  out += '\n';
  for (std::size_t i = 0; i < data.n_subjects(); ++i) {
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (j)
        out += ',';
      const int c = data.at(i, j);
      out += c == kMissing ? "NA" : std::to_string(c);
    }
    out += '\n';
  }
  return out;
}

} // namespace irtsmooth
