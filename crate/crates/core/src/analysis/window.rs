use std::f64::consts::PI;

/// Tapering windows in their periodic (DFT-even) form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    /// 4-term Blackman-Harris, about −92 dB peak sidelobe.
    #[default]
    BlackmanHarris4,
    /// 3-term Blackman-Harris, about −67 dB peak sidelobe.
    BlackmanHarris3,
    Hann,
    Rectangular,
}

impl Window {
    fn terms(self) -> &'static [f64] {
        match self {
            Window::BlackmanHarris4 => &[0.35875, 0.48829, 0.14128, 0.01168],
            Window::BlackmanHarris3 => &[0.42323, 0.49755, 0.07922],
            Window::Hann => &[0.5, 0.5],
            Window::Rectangular => &[1.0],
        }
    }

    pub fn coefficients(self, n: usize) -> Vec<f64> {
        let a = self.terms();
        (0..n)
            .map(|i| {
                let x = 2.0 * PI * i as f64 / n as f64;
                a.iter()
                    .enumerate()
                    .map(|(k, &ak)| if k % 2 == 0 { ak } else { -ak } * (k as f64 * x).cos())
                    .sum()
            })
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Window::BlackmanHarris4 => "blackman-harris-4",
            Window::BlackmanHarris3 => "blackman-harris-3",
            Window::Hann => "hann",
            Window::Rectangular => "rectangular",
        }
    }
}

impl std::str::FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [Window::BlackmanHarris4, Window::BlackmanHarris3, Window::Hann, Window::Rectangular]
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| format!("unknown window `{s}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_form_and_symmetry() {
        let w = Window::BlackmanHarris4.coefficients(16);
        assert!((w[0] - (0.35875 - 0.48829 + 0.14128 - 0.01168)).abs() < 1e-15);
        assert!((w[8] - 1.0).abs() < 1e-12);
        for i in 1..16 {
            assert!((w[i] - w[16 - i]).abs() < 1e-14);
        }
        assert!(Window::Rectangular.coefficients(4).iter().all(|&v| v == 1.0));
        assert_eq!("hann".parse::<Window>().unwrap(), Window::Hann);
    }
}
