use thiserror::Error;

use crate::geom::{Bounds, Point};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CameraError {
    #[error("zoom must be finite and > 0, got {0}")]
    Zoom(f64),
    #[error("camera center must be finite, got ({0}, {1})")]
    Center(f64, f64),
    #[error("viewport must be at least 1x1 px, got {0}x{1}")]
    Viewport(u32, u32),
    #[error("zoom factor must be finite and > 0, got {0}")]
    Factor(f64),
}

/// World-to-screen mapping: `zoom` screen pixels per world unit, world
/// `center` at the middle of a `width_px` x `height_px` viewport. World y
/// points up, screen y points down with the origin at the top-left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera2D {
    center_x: f64,
    center_y: f64,
    zoom: f64,
    width_px: u32,
    height_px: u32,
}

impl Camera2D {
    pub fn new(center: Point, zoom: f64, width_px: u32, height_px: u32) -> Result<Self, CameraError> {
        if !center.is_finite() {
            return Err(CameraError::Center(center.x, center.y));
        }
        if !(zoom.is_finite() && zoom > 0.0) {
            return Err(CameraError::Zoom(zoom));
        }
        if width_px == 0 || height_px == 0 {
            return Err(CameraError::Viewport(width_px, height_px));
        }
        Ok(Self {
            center_x: center.x,
            center_y: center.y,
            zoom,
            width_px,
            height_px,
        })
    }

    pub fn center(&self) -> Point {
        Point::new(self.center_x, self.center_y)
    }

    pub fn zoom(&self) -> f64 {
        self.zoom
    }

    pub fn width_px(&self) -> u32 {
        self.width_px
    }

    pub fn height_px(&self) -> u32 {
        self.height_px
    }

    fn half_size(&self) -> (f64, f64) {
        (self.width_px as f64 / 2.0, self.height_px as f64 / 2.0)
    }

    pub fn screen_to_world(&self, p: Point) -> Point {
        let (hw, hh) = self.half_size();
        Point::new(
            self.center_x + (p.x - hw) / self.zoom,
            self.center_y - (p.y - hh) / self.zoom,
        )
    }

    pub fn world_to_screen(&self, p: Point) -> Point {
        let (hw, hh) = self.half_size();
        Point::new(
            (p.x - self.center_x) * self.zoom + hw,
            hh - (p.y - self.center_y) * self.zoom,
        )
    }

    /// Moves the view so content follows a drag of `(dx_px, dy_px)`.
    pub fn pan(&self, dx_px: f64, dy_px: f64) -> Camera2D {
        Camera2D {
            center_x: self.center_x - dx_px / self.zoom,
            center_y: self.center_y + dy_px / self.zoom,
            ..*self
        }
    }

    /// Scales zoom by `factor`, keeping the world point under `anchor_px` fixed.
    pub fn zoom_about(&self, anchor_px: Point, factor: f64) -> Result<Camera2D, CameraError> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(CameraError::Factor(factor));
        }
        if factor == 1.0 {
            return Ok(*self);
        }
        let zoom = self.zoom * factor;
        if !(zoom.is_finite() && zoom > 0.0) {
            return Err(CameraError::Zoom(zoom));
        }
        let anchor_world = self.screen_to_world(anchor_px);
        let (hw, hh) = self.half_size();
        Camera2D::new(
            Point::new(
                anchor_world.x - (anchor_px.x - hw) / zoom,
                anchor_world.y + (anchor_px.y - hh) / zoom,
            ),
            zoom,
            self.width_px,
            self.height_px,
        )
    }

    /// Same center and zoom, new viewport size.
    pub fn resized(&self, width_px: u32, height_px: u32) -> Result<Camera2D, CameraError> {
        Camera2D::new(self.center(), self.zoom, width_px, height_px)
    }

    /// World-space rectangle covered by the viewport.
    pub fn visible_world(&self) -> Bounds {
        let (hw, hh) = self.half_size();
        let (dx, dy) = (hw / self.zoom, hh / self.zoom);
        Bounds::new(
            Point::new(self.center_x - dx, self.center_y - dy),
            Point::new(self.center_x + dx, self.center_y + dy),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cam(cx: f64, cy: f64, zoom: f64, w: u32, h: u32) -> Camera2D {
        Camera2D::new(Point::new(cx, cy), zoom, w, h).unwrap()
    }

    #[test]
    fn screen_to_world_examples() {
        let c = cam(0.0, 0.0, 1.0, 800, 600);
        assert_eq!(c.screen_to_world(Point::new(400.0, 300.0)), Point::new(0.0, 0.0));
        assert_eq!(c.screen_to_world(Point::new(0.0, 0.0)), Point::new(-400.0, 300.0));
        let c = cam(5.0, 5.0, 2.0, 800, 600);
        assert_eq!(c.screen_to_world(Point::new(400.0, 300.0)), Point::new(5.0, 5.0));
    }

    #[test]
    fn world_to_screen_examples() {
        let c = cam(0.0, 0.0, 1.0, 800, 600);
        assert_eq!(c.world_to_screen(Point::new(-400.0, 300.0)), Point::new(0.0, 0.0));
        assert_eq!(c.world_to_screen(Point::new(0.0, 0.0)), Point::new(400.0, 300.0));
        let c = cam(0.0, 0.0, 2.0, 800, 600);
        assert_eq!(c.world_to_screen(Point::new(1.0, 0.0)), Point::new(402.0, 300.0));
        let c = cam(0.0, 0.0, 1.0, 2, 2);
        assert_eq!(c.world_to_screen(Point::new(0.0, 0.0)), Point::new(1.0, 1.0));
    }

    #[test]
    fn pan_examples() {
        let c = cam(3.0, 4.0, 1.5, 100, 100);
        assert_eq!(c.pan(0.0, 0.0), c);
        assert_eq!(
            cam(0.0, 0.0, 1.0, 800, 600).pan(10.0, 0.0).center(),
            Point::new(-10.0, 0.0)
        );
        assert_eq!(
            cam(0.0, 0.0, 2.0, 800, 600).pan(10.0, 0.0).center(),
            Point::new(-5.0, 0.0)
        );
        // Dragging down moves the view up in world space.
        assert_eq!(
            cam(0.0, 0.0, 1.0, 800, 600).pan(0.0, 10.0).center(),
            Point::new(0.0, 10.0)
        );
    }

    #[test]
    fn zoom_about_examples() {
        let c = cam(0.0, 0.0, 1.0, 800, 600);
        assert_eq!(c.zoom_about(Point::new(123.0, 45.0), 1.0).unwrap(), c);
        let z = c.zoom_about(Point::new(400.0, 300.0), 2.0).unwrap();
        assert_eq!((z.center(), z.zoom()), (Point::new(0.0, 0.0), 2.0));
        let z = c.zoom_about(Point::new(0.0, 0.0), 2.0).unwrap();
        assert_eq!((z.center(), z.zoom()), (Point::new(-200.0, 150.0), 2.0));
        assert_eq!(c.zoom_about(Point::default(), 0.0), Err(CameraError::Factor(0.0)));
        assert!(c.zoom_about(Point::default(), -1.0).is_err());
        assert!(c.zoom_about(Point::default(), f64::INFINITY).is_err());
        assert!(c.zoom_about(Point::default(), f64::NAN).is_err());
    }

    #[test]
    fn invalid_cameras() {
        assert!(Camera2D::new(Point::default(), 0.0, 1, 1).is_err());
        assert!(Camera2D::new(Point::default(), f64::NAN, 1, 1).is_err());
        assert!(Camera2D::new(Point::default(), 1.0, 0, 1).is_err());
        assert!(Camera2D::new(Point::new(f64::INFINITY, 0.0), 1.0, 1, 1).is_err());
    }

    #[test]
    fn visible_world_scales_with_width() {
        let c = cam(0.0, 0.0, 2.0, 800, 600);
        let v = c.visible_world();
        assert_eq!((v.width(), v.height()), (400.0, 300.0));
        let v2 = c.resized(1600, 600).unwrap().visible_world();
        assert_eq!(v2.width(), 2.0 * v.width());
    }
}
