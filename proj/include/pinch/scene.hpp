// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pinchsim Authors
//
// Declarative scene files: schema, validation, task execution, and exports.
//
// A scene is JSON with units in key names (_mm, _ghz, _deg, _m, _w); all
// quantities are converted to SI on load. Unknown keys are rejected and every
// error names the offending key path (e.g. `waveguide.n_g`).
#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pinch/channel.hpp"
#include "pinch/constants.hpp"
#include "pinch/error.hpp"
#include "pinch/geometry.hpp"
#include "pinch/metrics.hpp"
#include "pinch/radiator.hpp"
#include "pinch/waveguide.hpp"

namespace pinch {

inline constexpr const char* tool_name = "pinchsim";
inline constexpr const char* tool_version = "0.1.0";

using json = nlohmann::ordered_json;

//! Scene validation failure; `key()` is the dotted path of the bad entry.
class ConfigError : public std::runtime_error
{
  public:
    ConfigError(std::string key, const std::string& msg)
        : std::runtime_error(key.empty() ? msg : key + ": " + msg), key_(std::move(key))
    {
    }
    const std::string& key() const noexcept { return key_; }

  private:
    std::string key_;
};

//---------------------------------------------------------------------------//
// Schema
//---------------------------------------------------------------------------//

struct ShapeSpec
{
    std::string type = "square"; // square | triangle | arc | polygon
    double side_mm = 12;
    double thickness_mm = 3;
    double outer_radius_mm = 15;
    double inner_radius_mm = 9;
    double span_deg = 120;
    double rotation_deg = 0; // arc rotation about its circle center
    std::vector<Vec2> vertices_mm;

    bool operator==(const ShapeSpec&) const = default;
};

struct PlacementSpec
{
    std::string mount = "on-rod"; // on-rod | beside-rod | explicit
    double rotation_deg = 0;
    double along_mm = 0;
    double offset_mm = 0;
    double gap_mm = 0;
    Vec3 translation_mm{};

    bool operator==(const PlacementSpec&) const = default;
};

struct PaSpec
{
    ShapeSpec shape;
    PlacementSpec placement;
    double eps_r = 2.1;
    Vec3 polarization{0, 1, 0};
    double depletion_per_mm = 0;

    bool operator==(const PaSpec&) const = default;
};

struct WaveguideSpec
{
    Vec3 axis_point_mm{};
    Vec3 axis_direction{1, 0, 0};
    double radius_mm = 1.5;
    double n_g = 0; // required
    double eps_r = 2.1;
    double feed_s_mm = 0;

    bool operator==(const WaveguideSpec&) const = default;
};

struct SamplingSpec
{
    double voxel_mm = 0.5;
    std::size_t n_theta = 91;
    std::size_t n_phi = 180;

    bool operator==(const SamplingSpec&) const = default;
};

struct PatternTask
{
    bool operator==(const PatternTask&) const = default;
};

struct CutTask
{
    double theta_deg = 90;
    double threshold_db = -10;
    double prominence_db = 1;
    bool operator==(const CutTask&) const = default;
};

struct SweepArcTask
{
    std::vector<double> alpha_list_deg;
    double theta_deg = 90;
    bool operator==(const SweepArcTask&) const = default;
};

struct BeamformTask
{
    Vec3 segment_start_m{};
    Vec3 segment_end_m{};
    std::size_t pa_count = 1;
    double grid_mm = 10;
    Vec3 user_xyz_m{};
    double power_w = 1;
    std::optional<Vec3> feed_xyz_m; // default: segment start
    bool geometry_gain = false;
    bool operator==(const BeamformTask&) const = default;
};

struct CompareTask
{
    std::string measured_csv;
    double window_db = 10;
    double theta_deg = 90;
    bool operator==(const CompareTask&) const = default;
};

using Task = std::variant<PatternTask, CutTask, SweepArcTask, BeamformTask, CompareTask>;

struct Scene
{
    std::string name;
    double f_ghz = 60;
    WaveguideSpec waveguide;
    PaSpec pa;
    SamplingSpec sampling;
    std::vector<Task> tasks;

    bool operator==(const Scene&) const = default;
};

//---------------------------------------------------------------------------//
// Parsing
//---------------------------------------------------------------------------//

namespace detail {

//! Reads keys of one JSON object, remembering which were consumed.
class ObjectReader
{
  public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError(path_, "expected an object");
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return j_.contains(key); }

    //! Sub-object, or an empty object when absent.
    const json& object(const std::string& key)
    {
        static const json empty = json::object();
        used_.insert(key);
        return j_.contains(key) ? j_.at(key) : empty;
    }

    const json& raw(const std::string& key)
    {
        used_.insert(key);
        if (!j_.contains(key))
            throw ConfigError(key_path(key), "missing required key");
        return j_.at(key);
    }

    double number(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_number())
            throw ConfigError(key_path(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x))
            throw ConfigError(key_path(key), "expected a finite number");
        return x;
    }
    double number(const std::string& key, double fallback)
    {
        return has(key) ? number(key) : (used_.insert(key), fallback);
    }

    std::size_t count(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ConfigError(key_path(key), "expected a non-negative integer");
        return static_cast<std::size_t>(v.get<long long>());
    }
    std::size_t count(const std::string& key, std::size_t fallback)
    {
        return has(key) ? count(key) : (used_.insert(key), fallback);
    }

    std::string string(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_string())
            throw ConfigError(key_path(key), "expected a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& key, std::string fallback)
    {
        return has(key) ? string(key) : (used_.insert(key), std::move(fallback));
    }

    bool boolean(const std::string& key, bool fallback)
    {
        if (!has(key))
            return fallback;
        const json& v = raw(key);
        if (!v.is_boolean())
            throw ConfigError(key_path(key), "expected true or false");
        return v.get<bool>();
    }

    Vec3 vec3(const std::string& key)
    {
        const json& v = raw(key);
        return to_vec3(v, key_path(key));
    }
    Vec3 vec3(const std::string& key, Vec3 fallback) { return has(key) ? vec3(key) : (used_.insert(key), fallback); }

    static Vec3 to_vec3(const json& v, const std::string& path)
    {
        if (!v.is_array() || v.size() != 3)
            throw ConfigError(path, "expected an array of 3 numbers");
        Vec3 out;
        double* dst[3] = {&out.x, &out.y, &out.z};
        for (std::size_t i = 0; i < 3; ++i)
        {
            if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
                throw ConfigError(path, "expected an array of 3 numbers");
            *dst[i] = v[i].get<double>();
        }
        return out;
    }

    //! Reject any key that was never read.
    void finish() const
    {
        for (const auto& item : j_.items())
        {
            if (!used_.count(item.key()))
                throw ConfigError(key_path(item.key()), "unknown key");
        }
    }

  private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

inline void check(bool cond, const std::string& key, const std::string& msg)
{
    if (!cond)
        throw ConfigError(key, msg);
}

inline ShapeSpec parse_shape(const json& j, const std::string& path)
{
    ObjectReader r(j, path);
    ShapeSpec s;
    s.type = r.string("type");
    s.thickness_mm = r.number("thickness_mm", 3.0);
    check(s.thickness_mm > 0, r.key_path("thickness_mm"), "must be positive");
    if (s.type == "square" || s.type == "triangle")
    {
        s.side_mm = r.number("side_mm");
        check(s.side_mm > 0, r.key_path("side_mm"), "must be positive");
    }
    else if (s.type == "arc")
    {
        s.outer_radius_mm = r.number("outer_radius_mm");
        s.inner_radius_mm = r.number("inner_radius_mm", 9.0);
        s.span_deg = r.number("span_deg", 120.0);
        s.rotation_deg = r.number("rotation_deg", 0.0);
        check(s.inner_radius_mm > 0, r.key_path("inner_radius_mm"), "must be positive");
        check(s.outer_radius_mm > s.inner_radius_mm, r.key_path("outer_radius_mm"), "must exceed inner_radius_mm");
        check(s.span_deg > 0 && s.span_deg <= 360, r.key_path("span_deg"), "must be in (0, 360]");
    }
    else if (s.type == "polygon")
    {
        const json& v = r.raw("vertices_mm");
        const std::string vp = r.key_path("vertices_mm");
        check(v.is_array() && v.size() >= 3, vp, "expected an array of at least 3 [x, y] pairs");
        for (const auto& p : v)
        {
            check(p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number(), vp,
                  "expected [x, y] number pairs");
            s.vertices_mm.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        std::vector<Vec2> m;
        for (auto p : s.vertices_mm)
            m.push_back(1e-3 * p);
        check(polygon_is_simple(m) && polygon_signed_area(m) != 0, vp, "polygon must be simple with nonzero area");
    }
    else
    {
        throw ConfigError(r.key_path("type"), "unknown shape type '" + s.type + "'");
    }
    r.finish();
    return s;
}

inline PlacementSpec parse_placement(const json& j, const std::string& path)
{
    ObjectReader r(j, path);
    PlacementSpec p;
    p.mount = r.string("mount", "on-rod");
    p.rotation_deg = r.number("rotation_deg", 0.0);
    if (p.mount == "on-rod" || p.mount == "beside-rod")
    {
        p.along_mm = r.number("along_mm", 0.0);
        p.gap_mm = r.number("gap_mm", 0.0);
        check(p.gap_mm >= 0, r.key_path("gap_mm"), "must be non-negative");
        if (p.mount == "on-rod")
            p.offset_mm = r.number("offset_mm", 0.0);
    }
    else if (p.mount == "explicit")
    {
        p.translation_mm = r.vec3("translation_mm");
    }
    else
    {
        throw ConfigError(r.key_path("mount"), "expected on-rod, beside-rod or explicit");
    }
    r.finish();
    return p;
}

inline std::string task_path(std::size_t i) { return "tasks[" + std::to_string(i) + "]"; }

inline Task parse_task(const json& j, std::size_t i)
{
    ObjectReader r(j, task_path(i));
    const std::string type = r.string("type");
    Task task;
    if (type == "pattern")
    {
        task = PatternTask{};
    }
    else if (type == "cut")
    {
        CutTask t;
        t.theta_deg = r.number("theta_deg", 90.0);
        t.threshold_db = r.number("threshold_db", -10.0);
        t.prominence_db = r.number("prominence_db", 1.0);
        check(t.theta_deg > 0 && t.theta_deg < 180, r.key_path("theta_deg"), "must be in (0, 180)");
        check(t.threshold_db < 0, r.key_path("threshold_db"), "must be negative");
        check(t.prominence_db > 0, r.key_path("prominence_db"), "must be positive");
        task = t;
    }
    else if (type == "sweep-arc")
    {
        SweepArcTask t;
        const json& a = r.raw("alpha_list_deg");
        check(a.is_array() && !a.empty(), r.key_path("alpha_list_deg"), "expected a non-empty array of numbers");
        for (const auto& x : a)
        {
            check(x.is_number(), r.key_path("alpha_list_deg"), "expected numbers");
            t.alpha_list_deg.push_back(x.get<double>());
        }
        t.theta_deg = r.number("theta_deg", 90.0);
        check(t.theta_deg > 0 && t.theta_deg < 180, r.key_path("theta_deg"), "must be in (0, 180)");
        task = t;
    }
    else if (type == "beamform")
    {
        BeamformTask t;
        const json& seg = r.raw("segment_m");
        check(seg.is_array() && seg.size() == 2, r.key_path("segment_m"), "expected [[x,y,z],[x,y,z]]");
        t.segment_start_m = ObjectReader::to_vec3(seg[0], r.key_path("segment_m"));
        t.segment_end_m = ObjectReader::to_vec3(seg[1], r.key_path("segment_m"));
        check(distance(t.segment_start_m, t.segment_end_m) > 0, r.key_path("segment_m"), "segment has zero length");
        t.pa_count = r.count("M");
        check(t.pa_count >= 1, r.key_path("M"), "must be at least 1");
        t.grid_mm = r.number("grid_mm");
        check(t.grid_mm > 0, r.key_path("grid_mm"), "must be positive");
        t.user_xyz_m = r.vec3("user_xyz_m");
        t.power_w = r.number("power_w", 1.0);
        check(t.power_w > 0, r.key_path("power_w"), "must be positive");
        if (r.has("feed_xyz_m"))
            t.feed_xyz_m = r.vec3("feed_xyz_m");
        t.geometry_gain = r.boolean("geometry_gain", false);
        const double len_mm = 1e3 * distance(t.segment_start_m, t.segment_end_m);
        check(len_mm + 1e-9 >= static_cast<double>(t.pa_count - 1) * t.grid_mm, r.key_path("M"),
              "segment too short for M PAs at grid_mm spacing");
        task = t;
    }
    else if (type == "compare")
    {
        CompareTask t;
        t.measured_csv = r.string("measured_csv");
        t.window_db = r.number("window_db", 10.0);
        t.theta_deg = r.number("theta_deg", 90.0);
        check(t.window_db > 0, r.key_path("window_db"), "must be positive");
        check(t.theta_deg > 0 && t.theta_deg < 180, r.key_path("theta_deg"), "must be in (0, 180)");
        task = t;
    }
    else
    {
        throw ConfigError(r.key_path("type"), "unknown task type '" + type + "'");
    }
    r.finish();
    return task;
}

inline bool theta_on_grid(double theta_deg, std::size_t n_theta)
{
    const double idx = theta_deg / 180.0 * static_cast<double>(n_theta) - 0.5;
    return std::abs(idx - std::round(idx)) < 1e-9 && idx >= 0 && idx < static_cast<double>(n_theta);
}

} // namespace detail

/*!
 * Parse and validate a scene. Relative `measured_csv` paths are resolved
 * against `base_dir`.
 */
inline Scene parse_scene(const json& j, const std::filesystem::path& base_dir = {})
{
    detail::ObjectReader top(j, "");
    Scene s;
    s.name = top.string("name", "");
    if (top.has("description"))
        top.string("description");

    {
        detail::ObjectReader r(top.object("signal"), "signal");
        s.f_ghz = r.number("f_ghz", 60.0);
        detail::check(s.f_ghz > 0, "signal.f_ghz", "must be positive");
        r.finish();
    }
    {
        detail::ObjectReader r(top.raw("waveguide"), "waveguide");
        auto& w = s.waveguide;
        w.axis_point_mm = r.vec3("axis_point_mm", Vec3{});
        w.axis_direction = r.vec3("axis_direction", Vec3{1, 0, 0});
        detail::check(norm(w.axis_direction) > 0, "waveguide.axis_direction", "must be nonzero");
        w.axis_direction = (1.0 / norm(w.axis_direction)) * w.axis_direction;
        w.radius_mm = r.number("radius_mm", 1.5);
        detail::check(w.radius_mm > 0, "waveguide.radius_mm", "must be positive");
        w.eps_r = r.number("eps_r", 2.1);
        detail::check(w.eps_r > 1, "waveguide.eps_r", "must exceed 1");
        w.n_g = r.number("n_g");
        detail::check(w.n_g > 1 && w.n_g <= std::sqrt(w.eps_r) + 1e-12, "waveguide.n_g",
                      "must be in (1, sqrt(eps_r)] for a guided mode");
        w.feed_s_mm = r.number("feed_s_mm", 0.0);
        r.finish();
    }
    {
        detail::ObjectReader r(top.raw("pa"), "pa");
        auto& p = s.pa;
        p.shape = detail::parse_shape(r.raw("shape"), "pa.shape");
        p.placement = detail::parse_placement(r.object("placement"), "pa.placement");
        p.eps_r = r.number("eps_r", 2.1);
        detail::check(p.eps_r >= 1, "pa.eps_r", "must be >= 1");
        p.polarization = r.vec3("polarization", Vec3{0, 1, 0});
        detail::check(norm(p.polarization) > 0, "pa.polarization", "must be nonzero");
        p.polarization = (1.0 / norm(p.polarization)) * p.polarization;
        detail::check(std::abs(dot(p.polarization, s.waveguide.axis_direction)) <= 1e-9, "pa.polarization",
                      "must be transverse to waveguide.axis_direction");
        p.depletion_per_mm = r.number("depletion_per_mm", 0.0);
        detail::check(p.depletion_per_mm >= 0, "pa.depletion_per_mm", "must be non-negative");
        r.finish();
        if (p.placement.mount != "explicit")
        {
            detail::check(std::abs(s.waveguide.axis_direction.z) <= 1e-12, "pa.placement.mount",
                          "rod mounts need a waveguide axis in the PA plate (xy) plane");
        }
    }
    {
        detail::ObjectReader r(top.object("sampling"), "sampling");
        auto& m = s.sampling;
        m.voxel_mm = r.number("voxel_mm", 0.5);
        detail::check(m.voxel_mm > 0, "sampling.voxel_mm", "must be positive");
        m.n_theta = r.count("n_theta", 91);
        m.n_phi = r.count("n_phi", 180);
        detail::check(m.n_theta >= 2, "sampling.n_theta", "must be at least 2");
        detail::check(m.n_phi >= 4, "sampling.n_phi", "must be at least 4");
        r.finish();
    }
    {
        const json& t = top.raw("tasks");
        detail::check(t.is_array(), "tasks", "expected an array");
        for (std::size_t i = 0; i < t.size(); ++i)
        {
            Task task = detail::parse_task(t[i], i);
            const std::string path = detail::task_path(i);
            auto need_theta = [&](double theta_deg) {
                detail::check(detail::theta_on_grid(theta_deg, s.sampling.n_theta), "sampling.n_theta",
                              "theta grid does not contain the cut angle of " + path
                                  + " (use an odd n_theta for 90 deg)");
            };
            if (auto* c = std::get_if<CutTask>(&task))
                need_theta(c->theta_deg);
            if (auto* c = std::get_if<SweepArcTask>(&task))
            {
                need_theta(c->theta_deg);
                detail::check(s.pa.shape.type == "arc", path + ".type", "sweep-arc needs an arc shape");
            }
            if (auto* c = std::get_if<CompareTask>(&task))
            {
                need_theta(c->theta_deg);
                std::filesystem::path csv(c->measured_csv);
                if (csv.is_relative() && !base_dir.empty())
                    csv = base_dir / csv;
                c->measured_csv = std::filesystem::absolute(csv).lexically_normal().string();
            }
            s.tasks.push_back(std::move(task));
        }
    }
    top.finish();
    return s;
}

//! Normalized scene with every default explicit; parse_scene(to_json(s)) == s.
inline json scene_to_json(const Scene& s)
{
    auto v3 = [](Vec3 v) { return json::array({v.x, v.y, v.z}); };
    json j;
    j["name"] = s.name;
    j["signal"] = {{"f_ghz", s.f_ghz}};
    const auto& w = s.waveguide;
    j["waveguide"] = {{"axis_point_mm", v3(w.axis_point_mm)},
                      {"axis_direction", v3(w.axis_direction)},
                      {"radius_mm", w.radius_mm},
                      {"n_g", w.n_g},
                      {"eps_r", w.eps_r},
                      {"feed_s_mm", w.feed_s_mm}};
    const auto& sh = s.pa.shape;
    json shape{{"type", sh.type}, {"thickness_mm", sh.thickness_mm}};
    if (sh.type == "square" || sh.type == "triangle")
        shape["side_mm"] = sh.side_mm;
    if (sh.type == "arc")
    {
        shape["outer_radius_mm"] = sh.outer_radius_mm;
        shape["inner_radius_mm"] = sh.inner_radius_mm;
        shape["span_deg"] = sh.span_deg;
        shape["rotation_deg"] = sh.rotation_deg;
    }
    if (sh.type == "polygon")
    {
        json verts = json::array();
        for (auto p : sh.vertices_mm)
            verts.push_back(json::array({p.x, p.y}));
        shape["vertices_mm"] = verts;
    }
    const auto& pl = s.pa.placement;
    json placement{{"mount", pl.mount}, {"rotation_deg", pl.rotation_deg}};
    if (pl.mount == "explicit")
    {
        placement["translation_mm"] = v3(pl.translation_mm);
    }
    else
    {
        placement["along_mm"] = pl.along_mm;
        placement["gap_mm"] = pl.gap_mm;
        if (pl.mount == "on-rod")
            placement["offset_mm"] = pl.offset_mm;
    }
    j["pa"] = {{"shape", shape},
               {"placement", placement},
               {"eps_r", s.pa.eps_r},
               {"polarization", v3(s.pa.polarization)},
               {"depletion_per_mm", s.pa.depletion_per_mm}};
    j["sampling"] = {{"voxel_mm", s.sampling.voxel_mm}, {"n_theta", s.sampling.n_theta}, {"n_phi", s.sampling.n_phi}};
    json tasks = json::array();
    for (const auto& t : s.tasks)
    {
        std::visit(detail::overloaded{
                       [&](const PatternTask&) { tasks.push_back({{"type", "pattern"}}); },
                       [&](const CutTask& c) {
                           tasks.push_back({{"type", "cut"},
                                            {"theta_deg", c.theta_deg},
                                            {"threshold_db", c.threshold_db},
                                            {"prominence_db", c.prominence_db}});
                       },
                       [&](const SweepArcTask& c) {
                           tasks.push_back(
                               {{"type", "sweep-arc"}, {"alpha_list_deg", c.alpha_list_deg}, {"theta_deg", c.theta_deg}});
                       },
                       [&](const BeamformTask& b) {
                           json o{{"type", "beamform"},
                                  {"segment_m", json::array({v3(b.segment_start_m), v3(b.segment_end_m)})},
                                  {"M", b.pa_count},
                                  {"grid_mm", b.grid_mm},
                                  {"user_xyz_m", v3(b.user_xyz_m)},
                                  {"power_w", b.power_w},
                                  {"geometry_gain", b.geometry_gain}};
                           if (b.feed_xyz_m)
                               o["feed_xyz_m"] = v3(*b.feed_xyz_m);
                           tasks.push_back(o);
                       },
                       [&](const CompareTask& c) {
                           tasks.push_back({{"type", "compare"},
                                            {"measured_csv", c.measured_csv},
                                            {"window_db", c.window_db},
                                            {"theta_deg", c.theta_deg}});
                       }},
                   t);
    }
    j["tasks"] = tasks;
    return j;
}

//---------------------------------------------------------------------------//
// Scene -> physics
//---------------------------------------------------------------------------//

inline SignalSpec scene_signal(const Scene& s) { return make_signal(s.f_ghz * 1e9); }

inline WaveguideModel scene_waveguide(const Scene& s)
{
    const auto& w = s.waveguide;
    return make_waveguide(1e-3 * w.axis_point_mm, w.axis_direction, 1e-3 * w.radius_mm, w.n_g, 1e-3 * w.feed_s_mm);
}

//! PA solid in the global frame; `arc_rotation_deg` overrides the arc's own rotation.
inline Shape scene_shape(const Scene& s, std::optional<double> arc_rotation_deg = std::nullopt)
{
    const auto& sh = s.pa.shape;
    const double t = 1e-3 * sh.thickness_mm;
    Shape shape = [&] {
        if (sh.type == "square")
            return make_square(1e-3 * sh.side_mm, t);
        if (sh.type == "triangle")
            return make_triangle(1e-3 * sh.side_mm, t);
        if (sh.type == "arc")
        {
            return make_arc(1e-3 * sh.outer_radius_mm, 1e-3 * sh.inner_radius_mm, deg_to_rad(sh.span_deg), t,
                            deg_to_rad(arc_rotation_deg.value_or(sh.rotation_deg)));
        }
        std::vector<Vec2> v;
        for (auto p : sh.vertices_mm)
            v.push_back(1e-3 * p);
        return make_polygon(std::move(v), t);
    }();

    const auto& pl = s.pa.placement;
    shape = transform_shape(std::move(shape), deg_to_rad(pl.rotation_deg), {});
    if (pl.mount == "explicit")
        return transform_shape(std::move(shape), 0, 1e-3 * pl.translation_mm);

    const WaveguideModel wg = scene_waveguide(s);
    const Vec3 a = wg.axis_direction;
    const Vec3 n{-a.y, a.x, 0}; // in-plane normal, rod -> PA side
    const Vec3 base = wg.axis_point + (1e-3 * pl.along_mm) * a;
    const double gap = 1e-3 * pl.gap_mm;
    if (pl.mount == "on-rod")
    {
        const double z = wg.axis_point.z + wg.surface_radius + gap + 0.5 * t;
        const Vec3 p = base + (1e-3 * pl.offset_mm) * n;
        return transform_shape(std::move(shape), 0, {p.x, p.y, z});
    }
    // beside-rod: nearest footprint edge touches the rod surface, plate mid-plane through the axis.
    const double smin = footprint_support_min(shape, {n.x, n.y});
    const Vec3 p = base + (wg.surface_radius + gap - smin) * n;
    return transform_shape(std::move(shape), 0, {p.x, p.y, wg.axis_point.z});
}

inline CurrentSet scene_currents(const Scene& s, const Shape& shape)
{
    const SignalSpec sig = scene_signal(s);
    const WaveguideModel wg = scene_waveguide(s);
    const Mesh mesh = mesh_shape(shape, 1e-3 * s.sampling.voxel_mm);
    const FieldSamples f = incident_field(mesh, wg, sig, s.pa.polarization, 1e3 * s.pa.depletion_per_mm);
    return equivalent_currents(mesh, f, s.pa.eps_r, sig);
}

//! Directivity pattern of the scene's PA on its sampling grid.
inline Pattern scene_pattern(const Scene& s, const Shape& shape, unsigned threads = 1)
{
    const CurrentSet cur = scene_currents(s, shape);
    return directivity_pattern(full_pattern(cur, scene_signal(s), s.sampling.n_theta, s.sampling.n_phi, threads));
}

//---------------------------------------------------------------------------//
// Exports
//---------------------------------------------------------------------------//

inline void write_pattern_csv(const Pattern& p, std::ostream& os)
{
    detail::require(p.has_directivity(), "pattern export needs directivity");
    os << "theta_deg,phi_deg,directivity_dbi\n";
    for (std::size_t i = 0; i < p.theta.size(); ++i)
    {
        const std::string th = format_fixed6(rad_to_deg(p.theta[i]));
        for (std::size_t j = 0; j < p.phi.size(); ++j)
            os << th << ',' << format_fixed6(rad_to_deg(p.phi[j])) << ',' << format_fixed6(p.directivity_dbi(i, j)) << '\n';
    }
}

namespace detail {
inline void write_file(const std::filesystem::path& path, const std::string& content, bool force)
{
    if (!force && std::filesystem::exists(path))
        throw IoError("refusing to overwrite " + path.string() + " (use --force)");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw IoError("cannot open " + path.string() + " for writing");
    os << content;
    os.close();
    if (!os)
        throw IoError("failed writing " + path.string());
}
} // namespace detail

//! Write polar-plot CSV data for a cut.
inline void export_plotdata(const Cut1D& cut, const std::filesystem::path& path, bool force = false)
{
    std::ostringstream os;
    write_cut_csv(cut, os);
    detail::write_file(path, os.str(), force);
}

//! Write full-sphere CSV data for a pattern (theta outer, phi inner).
inline void export_plotdata(const Pattern& p, const std::filesystem::path& path, bool force = false)
{
    std::ostringstream os;
    write_pattern_csv(p, os);
    detail::write_file(path, os.str(), force);
}

//---------------------------------------------------------------------------//
// Running
//---------------------------------------------------------------------------//

struct RunOptions
{
    bool force = false;
    unsigned threads = 1;
};

struct RunResult
{
    int exit_code = 0; // 0 ok, 1 config, 2 numerical, 3 I/O
    std::string message;
    std::vector<std::string> outputs;
};

namespace detail {

inline std::string angle_tag(double deg)
{
    std::string s = format_fixed6(deg);
    while (!s.empty() && s.back() == '0')
        s.pop_back();
    if (!s.empty() && s.back() == '.')
        s.pop_back();
    for (char& c : s)
    {
        if (c == '.')
            c = 'p';
    }
    return s;
}

inline std::vector<std::string> task_outputs(const Task& t)
{
    return std::visit(
        overloaded{
            [](const PatternTask&) { return std::vector<std::string>{"pattern.csv"}; },
            [](const CutTask& c) {
                return std::vector<std::string>{"cut_theta" + angle_tag(c.theta_deg) + ".csv", "lobes.txt"};
            },
            [](const SweepArcTask& c) {
                std::vector<std::string> out;
                for (double a : c.alpha_list_deg)
                    out.push_back("cut_alpha_" + angle_tag(a) + ".csv");
                out.push_back("sweep_summary.csv");
                return out;
            },
            [](const BeamformTask&) { return std::vector<std::string>{"beamform.txt"}; },
            [](const CompareTask&) { return std::vector<std::string>{"compare.txt"}; }},
        t);
}

inline std::string task_type(const Task& t)
{
    static const char* names[] = {"pattern", "cut", "sweep-arc", "beamform", "compare"};
    return names[t.index()];
}

inline std::string fmt_g(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string lobe_text(const LobeReport& rep, double theta_deg, double dmax_dbi, double threshold_db)
{
    std::ostringstream os;
    os << "theta_deg: " << format_fixed6(theta_deg) << '\n';
    os << "max_directivity_dbi: " << format_fixed6(dmax_dbi) << '\n';
    os << "peak_phi_deg: " << format_fixed6(rep.peak_angle_deg) << '\n';
    os << "peak_directivity_dbi: " << format_fixed6(rep.peak_value_db) << '\n';
    os << "hpbw_deg: " << format_fixed6(rep.hpbw_deg) << '\n';
    os << "main_lobe_threshold_db: " << format_fixed6(threshold_db) << '\n';
    if (rep.extent_full_circle)
        os << "main_lobe_extent_deg: full\n";
    else
        os << "main_lobe_extent_deg: " << format_fixed6(rep.extent_start_deg) << ", " << format_fixed6(rep.extent_end_deg) << '\n';
    os << "side_lobe_count: " << rep.side_lobes.size() << '\n';
    if (rep.side_lobes.empty())
    {
        os << "max_side_lobe_level_db: none\n";
    }
    else
    {
        os << "max_side_lobe_level_db: " << format_fixed6(rep.side_lobes.front().level_db) << '\n';
        os << "peak_to_side_lobe_db: " << format_fixed6(-rep.side_lobes.front().level_db) << '\n';
    }
    for (std::size_t k = 0; k < rep.side_lobes.size(); ++k)
    {
        os << "side_lobe_" << (k + 1) << ": " << format_fixed6(rep.side_lobes[k].angle_deg) << ", "
           << format_fixed6(rep.side_lobes[k].level_db) << '\n';
    }
    return os.str();
}

inline json read_json_file(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot read scene file " + path.string());
    try
    {
        return json::parse(is);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError("", std::string("invalid JSON in ") + path.string() + ": " + e.what());
    }
}

} // namespace detail

/*!
 * Load a scene (or a run manifest) and execute its tasks in order, writing
 * all artifacts plus manifest.json into `out_dir`.
 */
inline RunResult run_scene(const std::filesystem::path& config, const std::filesystem::path& out_dir, RunOptions opts = {})
{
    using clock = std::chrono::steady_clock;
    RunResult res;
    try
    {
        json j = detail::read_json_file(config);
        if (j.is_object() && j.contains("scene") && j.contains("tool"))
            j = j.at("scene");
        const Scene scene = parse_scene(j, config.parent_path());

        // Reject duplicate or pre-existing outputs before doing any work.
        std::set<std::string> names{"manifest.json"};
        std::vector<std::vector<std::string>> per_task;
        for (std::size_t i = 0; i < scene.tasks.size(); ++i)
        {
            per_task.push_back(detail::task_outputs(scene.tasks[i]));
            for (const auto& f : per_task.back())
            {
                if (!names.insert(f).second)
                    throw ConfigError(detail::task_path(i), "output '" + f + "' is produced twice");
            }
        }
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec || !std::filesystem::is_directory(out_dir))
            throw IoError("cannot create output directory " + out_dir.string());
        if (!opts.force)
        {
            for (const auto& f : names)
            {
                if (std::filesystem::exists(out_dir / f))
                    throw IoError("refusing to overwrite " + (out_dir / f).string() + " (use --force)");
            }
        }

        const Shape shape = scene_shape(scene);
        std::optional<Pattern> base;
        auto base_pattern = [&]() -> const Pattern& {
            if (!base)
                base = scene_pattern(scene, shape, opts.threads);
            return *base;
        };
        auto emit = [&](const std::string& name, const std::string& content) {
            detail::write_file(out_dir / name, content, true);
            res.outputs.push_back(name);
        };

        json manifest;
        manifest["tool"] = tool_name;
        manifest["version"] = tool_version;
        manifest["scene"] = scene_to_json(scene);
        manifest["threads"] = opts.threads;
        json task_log = json::array();

        for (const Task& task : scene.tasks)
        {
            const auto t0 = clock::now();
            const std::size_t first_output = res.outputs.size();
            std::visit(
                detail::overloaded{
                    [&](const PatternTask&) {
                        std::ostringstream os;
                        write_pattern_csv(base_pattern(), os);
                        emit("pattern.csv", os.str());
                    },
                    [&](const CutTask& c) {
                        const Pattern& p = base_pattern();
                        const Cut1D cut = azimuth_cut(p, deg_to_rad(c.theta_deg));
                        std::ostringstream os;
                        write_cut_csv(cut, os);
                        emit("cut_theta" + detail::angle_tag(c.theta_deg) + ".csv", os.str());
                        const LobeReport rep = lobe_report(cut, c.threshold_db, c.prominence_db);
                        emit("lobes.txt", detail::lobe_text(rep, c.theta_deg, to_db(pattern_peak(p).directivity), c.threshold_db));
                    },
                    [&](const SweepArcTask& c) {
                        std::ostringstream summary;
                        summary << "alpha_deg,peak_phi_deg\n";
                        for (double alpha : c.alpha_list_deg)
                        {
                            const Pattern p = scene_pattern(scene, scene_shape(scene, alpha), opts.threads);
                            const Cut1D cut = azimuth_cut(p, deg_to_rad(c.theta_deg));
                            std::ostringstream os;
                            write_cut_csv(cut, os);
                            emit("cut_alpha_" + detail::angle_tag(alpha) + ".csv", os.str());
                            summary << format_fixed6(alpha) << ',' << format_fixed6(main_lobe(cut).peak_angle_deg) << '\n';
                        }
                        emit("sweep_summary.csv", summary.str());
                    },
                    [&](const BeamformTask& b) {
                        const SignalSpec sig = scene_signal(scene);
                        const double lambda_g = mode_constants(scene.waveguide.n_g, sig.wavelength()).guided_wavelength;
                        LinkSpec link{b.user_xyz_m, sig.frequency, b.power_w, {}};
                        if (b.geometry_gain)
                            link.gain = pattern_gain(base_pattern());
                        const AxisSegment seg{b.segment_start_m, b.segment_end_m};
                        const Vec3 feed = b.feed_xyz_m.value_or(b.segment_start_m);
                        const PlacementResult r = optimize_placements(seg, 1e-3 * b.grid_mm, b.pa_count, link, feed, lambda_g);
                        const auto phases = guided_phases(r.layout);
                        std::ostringstream os;
                        os << "method: " << (b.pa_count <= 2 ? "exhaustive" : "greedy") << '\n';
                        os << "pa_count: " << b.pa_count << '\n';
                        os << "grid_points: " << candidate_grid(seg, 1e-3 * b.grid_mm).size() << '\n';
                        os << "geometry_gain: " << (b.geometry_gain ? "true" : "false") << '\n';
                        for (std::size_t m = 0; m < r.layout.locations.size(); ++m)
                        {
                            const Vec3 l = r.layout.locations[m];
                            os << "pa_" << (m + 1) << "_location_m: " << detail::fmt_g(l.x) << ", " << detail::fmt_g(l.y)
                               << ", " << detail::fmt_g(l.z) << '\n';
                            os << "pa_" << (m + 1) << "_phase_rad: " << detail::fmt_g(std::fmod(phases[m], two_pi)) << '\n';
                        }
                        os << "received_power_w: " << detail::fmt_g(r.power) << '\n';
                        os << "received_power_db_rel_p: " << format_fixed6(10 * std::log10(r.power / b.power_w)) << '\n';
                        emit("beamform.txt", os.str());
                    },
                    [&](const CompareTask& c) {
                        std::ifstream is(c.measured_csv);
                        if (!is)
                            throw IoError("cannot read measured CSV " + c.measured_csv);
                        const Pattern& p = base_pattern();
                        const Cut1D sim = azimuth_cut(p, deg_to_rad(c.theta_deg));
                        Cut1D meas;
                        try
                        {
                            meas = ingest_measurement(is, 360.0 / static_cast<double>(scene.sampling.n_phi));
                        }
                        catch (const ParseError& e)
                        {
                            throw ConfigError("", c.measured_csv + ": " + e.what());
                        }
                        const Comparison cmp = compare(sim, meas, c.window_db);
                        const LobeReport ls = main_lobe(sim);
                        const LobeReport lm = main_lobe(meas);
                        std::ostringstream os;
                        os << "measured_csv: " << c.measured_csv << '\n';
                        os << "window_db: " << format_fixed6(c.window_db) << '\n';
                        os << "phi_offset_deg: " << format_fixed6(cmp.phi_offset_deg) << '\n';
                        os << "peak_angle_error_deg: " << format_fixed6(cmp.peak_angle_error_deg) << '\n';
                        os << "rmse_db: " << format_fixed6(cmp.rmse_db) << '\n';
                        os << "window_samples: " << cmp.window_samples << '\n';
                        os << "simulated_peak_phi_deg: " << format_fixed6(ls.peak_angle_deg) << '\n';
                        os << "measured_peak_phi_deg: " << format_fixed6(lm.peak_angle_deg) << '\n';
                        os << "simulated_hpbw_deg: " << format_fixed6(ls.hpbw_deg) << '\n';
                        os << "measured_hpbw_deg: " << format_fixed6(lm.hpbw_deg) << '\n';
                        emit("compare.txt", os.str());
                    }},
                task);
            const double secs = std::chrono::duration<double>(clock::now() - t0).count();
            json outs = json::array();
            for (std::size_t k = first_output; k < res.outputs.size(); ++k)
                outs.push_back(res.outputs[k]);
            task_log.push_back({{"type", detail::task_type(task)}, {"outputs", outs}, {"wall_time_s", secs}});
        }
        manifest["tasks"] = task_log;
        detail::write_file(out_dir / "manifest.json", manifest.dump(2) + "\n", true);
        res.outputs.push_back("manifest.json");
        res.message = "ok";
    }
    catch (const ConfigError& e)
    {
        res.exit_code = 1;
        res.message = std::string("config error: ") + e.what();
    }
    catch (const InvalidArgument& e)
    {
        res.exit_code = 1;
        res.message = std::string("config error: ") + e.what();
    }
    catch (const NumericalError& e)
    {
        res.exit_code = 2;
        res.message = std::string("numerical failure: ") + e.what();
    }
    catch (const IoError& e)
    {
        res.exit_code = 3;
        res.message = std::string("I/O error: ") + e.what();
    }
    return res;
}

} // namespace pinch
