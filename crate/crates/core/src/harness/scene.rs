//! JSON scene schema, validation and assembly into a ready-to-step scene.

use std::path::{Path, PathBuf};

use nalgebra::{Rotation3, Unit};
use serde::{Deserialize, Serialize};

use super::generators::{generate_beam, generate_chain, generate_cube};
use super::HarnessError;
use crate::contact::ContactParams;
use crate::materials::MaterialParams;
use crate::math::Vec3;
use crate::mesh::{build_tet_mesh, io::load_tet_mesh, TetMesh};
use crate::solver::{
    Constraint, ConstraintKind, ConstraintTable, InitMode, LineSearch, Model, ModelBuilder,
    SimState, SolverParams,
};

/// Upper bound on generated vertices per object, to reject runaway sizes.
const MAX_VERTICES: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub objects: Vec<ObjectConfig>,
    #[serde(default = "default_gravity")]
    pub gravity: [f64; 3],
    #[serde(default)]
    pub constraints: Vec<ConstraintConfig>,
    #[serde(default)]
    pub contact: ContactConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub frames: usize,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_gravity() -> [f64; 3] {
    [0.0, -9.8, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    Beam {
        nx: usize,
        ny: usize,
        nz: usize,
        spacing: f64,
    },
    Cube {
        n: usize,
        edge: f64,
    },
    Chain {
        count: usize,
        spacing: f64,
        #[serde(default = "one")]
        mass: f64,
        #[serde(default = "one")]
        heavy_end_ratio: f64,
        stiffness: f64,
        #[serde(default)]
        damping: f64,
        /// Fix the first particle in place.
        #[serde(default = "yes")]
        pin_top: bool,
    },
    File {
        nodes: PathBuf,
        eles: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transform {
    #[serde(default = "unit_scale")]
    pub scale: [f64; 3],
    #[serde(default = "default_axis")]
    pub axis: [f64; 3],
    #[serde(default)]
    pub angle_deg: f64,
    #[serde(default)]
    pub translation: [f64; 3],
}

fn unit_scale() -> [f64; 3] {
    [1.0; 3]
}

fn default_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

impl Default for Transform {
    fn default() -> Self {
        Self {
            scale: unit_scale(),
            axis: default_axis(),
            angle_deg: 0.0,
            translation: [0.0; 3],
        }
    }
}

impl Transform {
    /// Scale, then rotate about `axis`, then translate.
    pub fn apply(&self, p: &Vec3) -> Vec3 {
        let rot = Rotation3::from_axis_angle(
            &Unit::new_normalize(Vec3::from(self.axis)),
            self.angle_deg.to_radians(),
        );
        rot * p.component_mul(&Vec3::from(self.scale)) + Vec3::from(self.translation)
    }
}

/// Initial deformation `origin + scale * (x - origin)` applied to the
/// starting positions only; the rest shape is unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stretch {
    pub scale: [f64; 3],
    #[serde(default)]
    pub origin: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectConfig {
    pub generator: Generator,
    #[serde(default)]
    pub material: Option<MaterialParams>,
    #[serde(default = "default_density")]
    pub density: f64,
    #[serde(default)]
    pub transform: Transform,
    #[serde(default)]
    pub stretch: Option<Stretch>,
    #[serde(default)]
    pub velocity: [f64; 3],
}

fn default_density() -> f64 {
    1000.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Region {
    fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }
}

/// Vertices of one object picked by explicit local ids, by a box around
/// their initial positions, or all of them when neither is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Selection {
    pub object: usize,
    #[serde(default)]
    pub vertices: Option<Vec<usize>>,
    #[serde(default)]
    pub region: Option<Region>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintConfig {
    /// Kinematic vertices, optionally driven at `velocity` until
    /// `stop_frame`.
    Fixed {
        #[serde(flatten)]
        select: Selection,
        #[serde(default)]
        velocity: Option<[f64; 3]>,
        #[serde(default)]
        stop_frame: Option<usize>,
    },
    /// Vertices restricted to their initial position plus the span of
    /// `basis`.
    Subspace {
        #[serde(flatten)]
        select: Selection,
        basis: Vec<[f64; 3]>,
    },
    /// Penalty box applied to every vertex of the listed objects (all
    /// objects when omitted).
    WorldBox {
        min: [f64; 3],
        max: [f64; 3],
        stiffness: f64,
        #[serde(default)]
        objects: Option<Vec<usize>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactConfig {
    #[serde(default)]
    pub k_c: f64,
    #[serde(default)]
    pub mu_c: f64,
    #[serde(default = "default_eps_v")]
    pub eps_v: f64,
    #[serde(default)]
    pub dcd_radius: f64,
}

fn default_eps_v() -> f64 {
    1e-2
}

impl Default for ContactConfig {
    fn default() -> Self {
        Self {
            k_c: 0.0,
            mu_c: 0.0,
            eps_v: default_eps_v(),
            dcd_radius: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Defaults to `1 / (60 S)`.
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(rename = "S", default = "default_substeps")]
    pub substeps: usize,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Defaults to `n_max`: CCD on the first iteration only.
    #[serde(default)]
    pub n_col: Option<usize>,
    #[serde(default)]
    pub rho: f64,
    #[serde(default = "default_eps_det")]
    pub eps_det: f64,
    #[serde(default)]
    pub line_search: LineSearch,
    #[serde(default)]
    pub init_mode: InitMode,
    #[serde(default)]
    pub persist_acceleration: bool,
}

fn default_substeps() -> usize {
    1
}

fn default_n_max() -> usize {
    10
}

fn default_eps_det() -> f64 {
    1e-10
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            h: None,
            substeps: 1,
            n_max: default_n_max(),
            n_col: None,
            rho: 0.0,
            eps_det: default_eps_det(),
            line_search: LineSearch::Off,
            init_mode: InitMode::Adaptive,
            persist_acceleration: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FrameFormat {
    #[default]
    Obj,
    Bin,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: FrameFormat,
    /// Write a metrics row after every iteration instead of every step.
    #[serde(default)]
    pub per_iteration: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            format: FrameFormat::Obj,
            per_iteration: false,
        }
    }
}

/// Parses and validates a scene. File references are checked later, when
/// the scene is built relative to its directory.
pub fn parse_scene(text: &str) -> Result<SceneConfig, HarnessError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: SceneConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        HarnessError::Schema {
            path: if path == "." { String::new() } else { path },
            message: e.into_inner().to_string(),
        }
    })?;
    config.validate()?;
    Ok(config)
}

pub fn serialize_scene(config: &SceneConfig) -> String {
    serde_json::to_string_pretty(config).expect("scene configs always serialize")
}

fn value_err(path: impl Into<String>, message: impl Into<String>) -> HarnessError {
    HarnessError::Value {
        path: path.into(),
        message: message.into(),
    }
}

fn finite3(path: &str, v: &[f64; 3]) -> Result<(), HarnessError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(value_err(path, "components must be finite"))
    }
}

fn positive(path: &str, v: f64) -> Result<(), HarnessError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(value_err(path, format!("must be positive, got {v}")))
    }
}

impl SceneConfig {
    pub fn solver_params(&self) -> SolverParams {
        let s = &self.solver;
        SolverParams {
            h: s.h.unwrap_or(1.0 / (60.0 * s.substeps.max(1) as f64)),
            substeps: s.substeps,
            n_max: s.n_max,
            n_col: s.n_col.unwrap_or(s.n_max),
            rho: s.rho,
            eps_det: s.eps_det,
            line_search: s.line_search,
            init_mode: s.init_mode,
            a_ext: Vec3::from(self.gravity),
            contact: ContactParams {
                k_c: self.contact.k_c,
                mu_c: self.contact.mu_c,
                eps_v: self.contact.eps_v,
                dcd_radius: self.contact.dcd_radius,
            },
            persist_acceleration: s.persist_acceleration,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.objects.is_empty() {
            return Err(value_err("objects", "at least one object is required"));
        }
        for (k, o) in self.objects.iter().enumerate() {
            o.validate(&format!("objects[{k}]"))?;
        }
        finite3("gravity", &self.gravity)?;
        for (k, c) in self.constraints.iter().enumerate() {
            self.validate_constraint(&format!("constraints[{k}]"), c)?;
        }
        self.solver_params().validate().map_err(|(field, msg)| {
            let section = match field {
                "k_c" | "mu_c" | "eps_v" | "dcd_radius" => "contact",
                "gravity" => return value_err("gravity", msg.clone()),
                _ => "solver",
            };
            value_err(format!("{section}.{field}"), msg)
        })
    }

    fn validate_constraint(&self, path: &str, c: &ConstraintConfig) -> Result<(), HarnessError> {
        let check_select = |s: &Selection| -> Result<(), HarnessError> {
            if s.object >= self.objects.len() {
                return Err(value_err(
                    format!("{path}.object"),
                    format!("no object {} ({} objects)", s.object, self.objects.len()),
                ));
            }
            if let Some(r) = &s.region {
                finite3(&format!("{path}.region.min"), &r.min)?;
                finite3(&format!("{path}.region.max"), &r.max)?;
            }
            Ok(())
        };
        match c {
            ConstraintConfig::Fixed {
                select, velocity, ..
            } => {
                check_select(select)?;
                if let Some(v) = velocity {
                    finite3(&format!("{path}.velocity"), v)?;
                }
            }
            ConstraintConfig::Subspace { select, basis } => {
                check_select(select)?;
                if basis.is_empty() || basis.len() > 2 {
                    return Err(value_err(format!("{path}.basis"), "must have 1 or 2 columns"));
                }
                for (i, a) in basis.iter().enumerate() {
                    for (j, b) in basis.iter().enumerate() {
                        let dot: f64 = (0..3).map(|k| a[k] * b[k]).sum();
                        let target = if i == j { 1.0 } else { 0.0 };
                        if !((dot - target).abs() <= 1e-9) {
                            return Err(value_err(format!("{path}.basis"), "columns must be orthonormal"));
                        }
                    }
                }
            }
            ConstraintConfig::WorldBox {
                min,
                max,
                stiffness,
                objects,
            } => {
                finite3(&format!("{path}.min"), min)?;
                finite3(&format!("{path}.max"), max)?;
                if !(0..3).all(|a| min[a] < max[a]) {
                    return Err(value_err(format!("{path}.max"), "must exceed min on every axis"));
                }
                if !(*stiffness >= 0.0 && stiffness.is_finite()) {
                    return Err(value_err(format!("{path}.stiffness"), "must be non-negative"));
                }
                if let Some(objs) = objects {
                    if let Some(o) = objs.iter().find(|&&o| o >= self.objects.len()) {
                        return Err(value_err(format!("{path}.objects"), format!("no object {o}")));
                    }
                }
            }
        }
        Ok(())
    }
}

impl ObjectConfig {
    fn is_tet_object(&self) -> bool {
        !matches!(self.generator, Generator::Chain { .. })
    }

    fn validate(&self, path: &str) -> Result<(), HarnessError> {
        let g = format!("{path}.generator");
        match &self.generator {
            Generator::Beam { nx, ny, nz, spacing } => {
                for (name, n) in [("nx", nx), ("ny", ny), ("nz", nz)] {
                    if *n < 2 {
                        return Err(value_err(format!("{g}.{name}"), "must be at least 2"));
                    }
                }
                let total = nx.checked_mul(*ny).and_then(|v| v.checked_mul(*nz));
                if total.map_or(true, |t| t > MAX_VERTICES) {
                    return Err(value_err(&g, format!("more than {MAX_VERTICES} vertices")));
                }
                positive(&format!("{g}.spacing"), *spacing)?;
            }
            Generator::Cube { n, edge } => {
                if *n < 2 {
                    return Err(value_err(format!("{g}.n"), "must be at least 2"));
                }
                let total = n.checked_mul(*n).and_then(|v| v.checked_mul(*n));
                if total.map_or(true, |t| t > MAX_VERTICES) {
                    return Err(value_err(&g, format!("more than {MAX_VERTICES} vertices")));
                }
                positive(&format!("{g}.edge"), *edge)?;
            }
            Generator::Chain {
                count,
                spacing,
                mass,
                heavy_end_ratio,
                stiffness,
                damping,
                ..
            } => {
                if *count < 2 || *count > MAX_VERTICES {
                    return Err(value_err(format!("{g}.count"), "must be between 2 and the size limit"));
                }
                positive(&format!("{g}.spacing"), *spacing)?;
                positive(&format!("{g}.mass"), *mass)?;
                positive(&format!("{g}.heavy_end_ratio"), *heavy_end_ratio)?;
                if !(*stiffness >= 0.0 && stiffness.is_finite()) {
                    return Err(value_err(format!("{g}.stiffness"), "must be non-negative"));
                }
                if !(*damping >= 0.0 && damping.is_finite()) {
                    return Err(value_err(format!("{g}.damping"), "must be non-negative"));
                }
            }
            Generator::File { .. } => {}
        }
        if self.is_tet_object() {
            match &self.material {
                None => return Err(value_err(format!("{path}.material"), "required for tet objects")),
                Some(m) => m
                    .validate()
                    .map_err(|msg| value_err(format!("{path}.material"), msg))?,
            }
        }
        positive(&format!("{path}.density"), self.density)?;
        let t = &self.transform;
        finite3(&format!("{path}.transform.scale"), &t.scale)?;
        if t.scale.iter().any(|&s| s == 0.0) {
            return Err(value_err(format!("{path}.transform.scale"), "must be non-zero"));
        }
        finite3(&format!("{path}.transform.axis"), &t.axis)?;
        if t.axis.iter().all(|&a| a == 0.0) {
            return Err(value_err(format!("{path}.transform.axis"), "must be non-zero"));
        }
        if !t.angle_deg.is_finite() {
            return Err(value_err(format!("{path}.transform.angle_deg"), "must be finite"));
        }
        finite3(&format!("{path}.transform.translation"), &t.translation)?;
        if let Some(s) = &self.stretch {
            finite3(&format!("{path}.stretch.scale"), &s.scale)?;
            finite3(&format!("{path}.stretch.origin"), &s.origin)?;
        }
        finite3(&format!("{path}.velocity"), &self.velocity)
    }
}

/// Vertex driven at a prescribed velocity until `stop_frame`.
#[derive(Debug, Clone, PartialEq)]
pub struct Driver {
    pub vertex: usize,
    pub velocity: Vec3,
    pub stop_frame: Option<usize>,
}

/// A scene ready to simulate.
#[derive(Debug, Clone)]
pub struct Scene {
    pub config: SceneConfig,
    pub model: Model,
    pub table: ConstraintTable,
    pub constraints: Vec<Constraint>,
    pub params: SolverParams,
    pub state: SimState,
    pub drivers: Vec<Driver>,
}

impl Scene {
    /// Applies the prescribed velocities for `frame` to the step-start
    /// velocities of driven vertices.
    pub fn drive(&mut self, frame: usize) {
        for d in &self.drivers {
            let active = d.stop_frame.map_or(true, |s| frame < s);
            self.state.v_t[d.vertex] = if active { d.velocity } else { Vec3::zeros() };
        }
    }
}

pub fn load_scene(path: &Path) -> Result<Scene, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let config = parse_scene(&text)?;
    build_scene(config, path.parent().unwrap_or(Path::new(".")))
}

/// Builds geometry, constraints and the initial state. Relative mesh paths
/// resolve against `base_dir`.
pub fn build_scene(config: SceneConfig, base_dir: &Path) -> Result<Scene, HarnessError> {
    config.validate()?;
    let mut builder = ModelBuilder::new();
    let mut initial: Vec<Vec3> = Vec::new();
    let mut velocity: Vec<Vec3> = Vec::new();
    let mut offsets = Vec::new();
    for (k, o) in config.objects.iter().enumerate() {
        let path = format!("objects[{k}]");
        offsets.push(initial.len());
        let rest: Vec<Vec3> = match &o.generator {
            Generator::Chain {
                count,
                spacing,
                mass,
                heavy_end_ratio,
                stiffness,
                damping,
                ..
            } => {
                let mut net = generate_chain(*count, *spacing, *heavy_end_ratio, *mass, *stiffness)
                    .map_err(|e| value_err(format!("{path}.generator"), e.to_string()))?;
                net.damping = *damping;
                for p in &mut net.particles {
                    *p = o.transform.apply(p);
                }
                // Rest lengths follow the transformed geometry.
                for s in &mut net.springs {
                    s.rest_length = (net.particles[s.j] - net.particles[s.i]).norm();
                    if !(s.rest_length > 0.0) {
                        return Err(value_err(format!("{path}.transform"), "collapses the chain"));
                    }
                }
                builder.add_spring_net(&net);
                net.particles.clone()
            }
            _ => {
                let mesh = object_mesh(o, &path, base_dir)?;
                let material = o.material.expect("validated");
                builder.add_tet_mesh(&mesh, material);
                mesh.rest_positions.clone()
            }
        };
        let start: Vec<Vec3> = match &o.stretch {
            Some(s) => {
                let origin = Vec3::from(s.origin);
                let scale = Vec3::from(s.scale);
                rest.iter()
                    .map(|p| origin + (p - origin).component_mul(&scale))
                    .collect()
            }
            None => rest.clone(),
        };
        velocity.extend(std::iter::repeat(Vec3::from(o.velocity)).take(start.len()));
        initial.extend(start);
    }
    offsets.push(initial.len());
    let mut model = builder.build();

    let mut constraints = Vec::new();
    let mut drivers = Vec::new();
    for (k, o) in config.objects.iter().enumerate() {
        if let Generator::Chain { pin_top: true, .. } = o.generator {
            constraints.push(Constraint::fixed(offsets[k]));
            velocity[offsets[k]] = Vec3::zeros();
        }
    }
    let select = |path: &str, s: &Selection| -> Result<Vec<usize>, HarnessError> {
        let (lo, hi) = (offsets[s.object], offsets[s.object + 1]);
        let mut ids: Vec<usize> = match &s.vertices {
            Some(v) => {
                if let Some(&bad) = v.iter().find(|&&i| i >= hi - lo) {
                    return Err(value_err(
                        format!("{path}.vertices"),
                        format!("vertex {bad} out of range ({} vertices)", hi - lo),
                    ));
                }
                v.iter().map(|&i| i + lo).collect()
            }
            None => (lo..hi).collect(),
        };
        if let Some(r) = &s.region {
            ids.retain(|&i| r.contains(&initial[i]));
        }
        if ids.is_empty() {
            return Err(value_err(path, "selects no vertices"));
        }
        Ok(ids)
    };
    for (k, c) in config.constraints.iter().enumerate() {
        let path = format!("constraints[{k}]");
        match c {
            ConstraintConfig::Fixed {
                select: s,
                velocity: v,
                stop_frame,
            } => {
                for i in select(&path, s)? {
                    constraints.push(Constraint::fixed(i));
                    velocity[i] = Vec3::zeros();
                    if let Some(v) = v {
                        drivers.push(Driver {
                            vertex: i,
                            velocity: Vec3::from(*v),
                            stop_frame: *stop_frame,
                        });
                    }
                }
            }
            ConstraintConfig::Subspace { select: s, basis } => {
                let basis: Vec<Vec3> = basis.iter().map(|b| Vec3::from(*b)).collect();
                for i in select(&path, s)? {
                    constraints.push(Constraint {
                        vertex: i,
                        kind: ConstraintKind::Subspace {
                            basis: basis.clone(),
                            anchor: initial[i],
                        },
                    });
                }
            }
            ConstraintConfig::WorldBox {
                min,
                max,
                stiffness,
                objects,
            } => {
                let objs: Vec<usize> = objects
                    .clone()
                    .unwrap_or_else(|| (0..config.objects.len()).collect());
                for o in objs {
                    for i in offsets[o]..offsets[o + 1] {
                        constraints.push(Constraint {
                            vertex: i,
                            kind: ConstraintKind::WorldBox {
                                min: Vec3::from(*min),
                                max: Vec3::from(*max),
                                stiffness: *stiffness,
                            },
                        });
                    }
                }
            }
        }
    }
    let table = ConstraintTable::new(model.num_vertices(), &constraints)
        .map_err(|m| value_err("constraints", m))?;
    model.apply_constraints(&table);
    let params = config.solver_params();
    let mut state = SimState::new(initial, velocity);
    for d in &drivers {
        state.v_t[d.vertex] = d.velocity;
        state.v_prev[d.vertex] = d.velocity;
    }
    Ok(Scene {
        config,
        model,
        table,
        constraints,
        params,
        state,
        drivers,
    })
}

fn object_mesh(o: &ObjectConfig, path: &str, base_dir: &Path) -> Result<TetMesh, HarnessError> {
    let (positions, tets) = match &o.generator {
        Generator::Beam { nx, ny, nz, spacing } => generate_beam(*nx, *ny, *nz, *spacing),
        Generator::Cube { n, edge } => generate_cube(*n, *edge),
        Generator::File { nodes, eles } => {
            let resolve = |p: &PathBuf| if p.is_absolute() { p.clone() } else { base_dir.join(p) };
            let (np, ep) = (resolve(nodes), resolve(eles));
            for (key, p) in [("nodes", &np), ("eles", &ep)] {
                if !p.is_file() {
                    return Err(value_err(
                        format!("{path}.generator.{key}"),
                        format!("file not found: {}", p.display()),
                    ));
                }
            }
            let mesh = load_tet_mesh(&np, &ep, o.density)
                .map_err(|e| value_err(format!("{path}.generator"), e.to_string()))?;
            (mesh.rest_positions, mesh.tets)
        }
        Generator::Chain { .. } => unreachable!("chains are spring nets"),
    };
    let positions = positions.iter().map(|p| o.transform.apply(p)).collect();
    let mut tets = tets;
    // A mirroring scale flips every tet; restore positive orientation.
    if o.transform.scale.iter().filter(|&&s| s < 0.0).count() % 2 == 1 {
        for t in &mut tets {
            t.swap(2, 3);
        }
    }
    build_tet_mesh(positions, tets, o.density)
        .map_err(|e| value_err(format!("{path}.generator"), e.to_string()))
}
