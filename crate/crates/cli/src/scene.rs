//! Scene description file: TOML schema consumed by `synth`.

use serde::Deserialize;
use srt4d::fmcw::{ChirpConfig, SceneSpec, Target, VirtualArray};

pub const SCHEMA_HELP: &str = r#"Scene description schema (TOML):

[chirp]
carrier_wavelength = 0.004     # meters
slope = 8.0e12                 # Hz/s chirp slope
sample_rate = 2.5e6            # Hz ADC rate
samples_per_chirp = 256        # power of two
chirps_per_frame = 128         # power of two
chirp_interval = 1.0e-4        # seconds between chirp starts

[array]
azimuth_elements = 64          # power of two
elevation_elements = 32        # power of two

[grid]
azimuth_fov_deg = 106.0        # total azimuth field of view
elevation_fov_deg = 36.0       # total elevation field of view

[scene]
noise_floor = 1.0e-4           # linear noise power per sample (0 = noiseless)
seed = 7                       # u64; --seed overrides

[[scene.targets]]
position = [20.0, 1.0, 0.5]    # meters: x forward, y left, z up
radial_velocity = 3.0          # m/s, positive receding
amplitude = 1.0                # linear reflectivity
"#;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    chirp: ChirpSection,
    array: ArraySection,
    grid: GridSection,
    scene: SceneSection,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChirpSection {
    carrier_wavelength: f64,
    slope: f64,
    sample_rate: f64,
    samples_per_chirp: usize,
    chirps_per_frame: usize,
    chirp_interval: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ArraySection {
    azimuth_elements: usize,
    elevation_elements: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    azimuth_fov_deg: f64,
    elevation_fov_deg: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneSection {
    noise_floor: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    targets: Vec<TargetSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetSection {
    position: [f64; 3],
    #[serde(default)]
    radial_velocity: f64,
    #[serde(default = "one")]
    amplitude: f64,
}

fn one() -> f64 {
    1.0
}

/// Fully parsed scene: everything `synth` needs.
pub struct ParsedScene {
    pub chirp: ChirpConfig,
    pub array: VirtualArray,
    pub azimuth_fov: f64,
    pub elevation_fov: f64,
    pub scene: SceneSpec,
}

pub fn parse_scene(text: &str) -> Result<ParsedScene, String> {
    let file: SceneFile = toml::from_str(text).map_err(|e| e.to_string())?;
    let chirp = ChirpConfig {
        carrier_wavelength: file.chirp.carrier_wavelength,
        slope: file.chirp.slope,
        sample_rate: file.chirp.sample_rate,
        samples_per_chirp: file.chirp.samples_per_chirp,
        chirps_per_frame: file.chirp.chirps_per_frame,
        chirp_interval: file.chirp.chirp_interval,
    };
    chirp.validate().map_err(|e| e.to_string())?;
    let array = VirtualArray {
        azimuth_elements: file.array.azimuth_elements,
        elevation_elements: file.array.elevation_elements,
    };
    array.validate().map_err(|e| e.to_string())?;
    if !(file.grid.azimuth_fov_deg > 0.0 && file.grid.azimuth_fov_deg <= 180.0) {
        return Err(format!(
            "grid.azimuth_fov_deg must be in (0, 180], got {}",
            file.grid.azimuth_fov_deg
        ));
    }
    if !(file.grid.elevation_fov_deg > 0.0 && file.grid.elevation_fov_deg < 180.0) {
        return Err(format!(
            "grid.elevation_fov_deg must be in (0, 180), got {}",
            file.grid.elevation_fov_deg
        ));
    }
    if !(file.scene.noise_floor >= 0.0 && file.scene.noise_floor.is_finite()) {
        return Err(format!(
            "scene.noise_floor must be finite and non-negative, got {}",
            file.scene.noise_floor
        ));
    }
    let scene = SceneSpec {
        targets: file
            .scene
            .targets
            .into_iter()
            .map(|t| Target {
                position: t.position,
                radial_velocity: t.radial_velocity,
                amplitude: t.amplitude,
            })
            .collect(),
        noise_floor: file.scene.noise_floor,
        seed: file.scene.seed,
    };
    Ok(ParsedScene {
        chirp,
        array,
        azimuth_fov: file.grid.azimuth_fov_deg.to_radians(),
        elevation_fov: file.grid.elevation_fov_deg.to_radians(),
        scene,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> &'static str {
        // The schema help text doubles as the canonical example.
        let start = SCHEMA_HELP.find("[chirp]").unwrap();
        &SCHEMA_HELP[start..]
    }

    #[test]
    fn schema_example_parses() {
        let parsed = parse_scene(example()).unwrap();
        assert_eq!(parsed.chirp.samples_per_chirp, 256);
        assert_eq!(parsed.array.azimuth_elements, 64);
        assert_eq!(parsed.scene.targets.len(), 1);
        assert_eq!(parsed.scene.seed, 7);
        assert!((parsed.azimuth_fov - 106f64.to_radians()).abs() < 1e-12);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = example().replace("noise_floor", "noise_floorr");
        assert!(parse_scene(&text).is_err());
    }

    #[test]
    fn physics_violations_are_rejected() {
        let text = example().replace("samples_per_chirp = 256", "samples_per_chirp = 100");
        assert!(parse_scene(&text).is_err());
        let text = example().replace("azimuth_fov_deg = 106.0", "azimuth_fov_deg = -10.0");
        assert!(parse_scene(&text).is_err());
    }

    #[test]
    fn targets_are_optional_with_defaulted_fields() {
        let text = "
[chirp]
carrier_wavelength = 0.004
slope = 8.0e12
sample_rate = 2.5e6
samples_per_chirp = 64
chirps_per_frame = 16
chirp_interval = 1.0e-4
[array]
azimuth_elements = 16
elevation_elements = 8
[grid]
azimuth_fov_deg = 106.0
elevation_fov_deg = 36.0
[scene]
noise_floor = 0.0
";
        let parsed = parse_scene(text).unwrap();
        assert!(parsed.scene.targets.is_empty());
        assert_eq!(parsed.scene.seed, 0);
        assert_eq!(parsed.scene.noise_floor, 0.0);
    }
}
