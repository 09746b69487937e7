//! 2D primitives for the continuous workspace: points, axis-aligned
//! rectangles, and the segment/rectangle intersection test used for
//! collision checking.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// Axis-aligned rectangle given by its lower-left corner and size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Rect { x, y, w, h }
    }

    pub fn center(&self) -> Point {
        Point::new(self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.x && p.x <= self.x + self.w && p.y >= self.y && p.y <= self.y + self.h
    }

    /// Rectangle grown by `margin` on every side. A disc robot of radius
    /// `margin` collides with the original rectangle iff its center lies in
    /// the inflated one (conservative at the corners).
    pub fn inflate(&self, margin: f64) -> Rect {
        Rect {
            x: self.x - margin,
            y: self.y - margin,
            w: self.w + 2.0 * margin,
            h: self.h + 2.0 * margin,
        }
    }

    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x < other.x + other.w
            && other.x < self.x + self.w
            && self.y < other.y + other.h
            && other.y < self.y + self.h
    }

    /// Slab test: does the closed segment a-b intersect this rectangle?
    pub fn intersects_segment(&self, a: &Point, b: &Point) -> bool {
        let (mut tmin, mut tmax) = (0.0f64, 1.0f64);
        let d = (b.x - a.x, b.y - a.y);
        for (start, delta, lo, hi) in [
            (a.x, d.0, self.x, self.x + self.w),
            (a.y, d.1, self.y, self.y + self.h),
        ] {
            if delta.abs() < 1e-12 {
                if start < lo || start > hi {
                    return false;
                }
            } else {
                let (mut t1, mut t2) = ((lo - start) / delta, (hi - start) / delta);
                if t1 > t2 {
                    std::mem::swap(&mut t1, &mut t2);
                }
                tmin = tmin.max(t1);
                tmax = tmax.min(t2);
                if tmin > tmax {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_through_rect() {
        let r = Rect::new(1.0, 1.0, 2.0, 2.0);
        assert!(r.intersects_segment(&Point::new(0.0, 2.0), &Point::new(4.0, 2.0)));
        assert!(!r.intersects_segment(&Point::new(0.0, 0.0), &Point::new(4.0, 0.5)));
        // Endpoint inside counts as a hit.
        assert!(r.intersects_segment(&Point::new(2.0, 2.0), &Point::new(5.0, 5.0)));
        // Degenerate segment.
        assert!(r.intersects_segment(&Point::new(2.0, 2.0), &Point::new(2.0, 2.0)));
        assert!(!r.intersects_segment(&Point::new(0.5, 0.5), &Point::new(0.5, 0.5)));
    }

    #[test]
    fn inflate_grows_all_sides() {
        let r = Rect::new(1.0, 1.0, 2.0, 2.0).inflate(0.5);
        assert_eq!(r, Rect::new(0.5, 0.5, 3.0, 3.0));
    }

    #[test]
    fn overlap_is_strict() {
        let a = Rect::new(0.0, 0.0, 1.0, 1.0);
        let b = Rect::new(1.0, 0.0, 1.0, 1.0);
        assert!(!a.overlaps(&b)); // touching edges do not overlap
        assert!(a.overlaps(&Rect::new(0.5, 0.5, 1.0, 1.0)));
    }
}
