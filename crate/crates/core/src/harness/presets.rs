use super::HarnessError;

pub const PRESET_NAMES: [&str; 5] = ["fig1", "fig2", "fig3b", "fig3cde", "fig4"];

const TEXTS: [&str; 5] = [
    include_str!("../../presets/fig1.conf"),
    include_str!("../../presets/fig2.conf"),
    include_str!("../../presets/fig3b.conf"),
    include_str!("../../presets/fig3cde.conf"),
    include_str!("../../presets/fig4.conf"),
];

/// Config text of a bundled preset.
pub fn preset(name: &str) -> Result<&'static str, HarnessError> {
    PRESET_NAMES
        .iter()
        .position(|&n| n == name)
        .map(|i| TEXTS[i])
        .ok_or_else(|| HarnessError::UnknownPreset(name.to_string()))
}
