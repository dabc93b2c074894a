//! Voronoi diagrams restricted to the unit square, and the vertex welding that
//! turns independently clipped cells into a conforming polygon mesh.

use std::collections::HashMap;

pub(super) type P2 = [f64; 2];

/// Weld tolerance for vertices produced by independent clipping.
const WELD_TOL: f64 = 1e-10;
const SIDE_TOL: f64 = 1e-12;

/// Voronoi cell of every seed, clipped to the unit square, as counter-clockwise loops.
pub(super) fn clipped_cells(seeds: &[P2]) -> Vec<Vec<P2>> {
    seeds
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut others: Vec<(f64, usize)> = seeds
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, q)| (dist2(s, *q), j))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut poly = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
            for (d2, j) in others {
                let reach2 = poly.iter().map(|v| dist2(s, *v)).fold(0.0, f64::max);
                // Seeds farther than twice the cell's reach cannot cut it.
                if d2 > 4.0 * reach2 {
                    break;
                }
                poly = clip_bisector(&poly, s, seeds[j]);
            }
            poly
        })
        .collect()
}

/// Keeps the part of `poly` closer to `s` than to `q`.
fn clip_bisector(poly: &[P2], s: P2, q: P2) -> Vec<P2> {
    let n = [q[0] - s[0], q[1] - s[1]];
    let m = [(q[0] + s[0]) * 0.5, (q[1] + s[1]) * 0.5];
    let side = |p: &P2| (p[0] - m[0]) * n[0] + (p[1] - m[1]) * n[1];
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (sa, sb) = (side(&a), side(&b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

pub(super) fn polygon_centroid(poly: &[P2]) -> P2 {
    let mut a2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let cr = p[0] * q[1] - q[0] * p[1];
        a2 += cr;
        cx += (p[0] + q[0]) * cr;
        cy += (p[1] + q[1]) * cr;
    }
    [cx / (3.0 * a2), cy / (3.0 * a2)]
}

fn dist2(a: P2, b: P2) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Bit set of unit-square sides a point lies on: 1 left, 2 right, 4 bottom, 8 top.
fn sides(p: P2) -> u8 {
    let mut f = 0;
    if p[0].abs() < SIDE_TOL {
        f |= 1;
    }
    if (p[0] - 1.0).abs() < SIDE_TOL {
        f |= 2;
    }
    if p[1].abs() < SIDE_TOL {
        f |= 4;
    }
    if (p[1] - 1.0).abs() < SIDE_TOL {
        f |= 8;
    }
    f
}

/// Welds coincident vertices and collapses edges shorter than `min_edge`,
/// returning a shared vertex array and index loops.
pub(super) fn weld(cells: &[Vec<P2>], min_edge: f64) -> (Vec<P2>, Vec<Vec<usize>>) {
    // Weld through a hash grid with neighbour lookup.
    let cell_size = WELD_TOL * 10.0;
    let key = |p: P2| {
        (
            (p[0] / cell_size).floor() as i64,
            (p[1] / cell_size).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut verts: Vec<P2> = Vec::new();
    let mut loops: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
    for poly in cells {
        let mut lp = Vec::with_capacity(poly.len());
        for &p in poly {
            let (kx, ky) = key(p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(ids) = grid.get(&(kx + dx, ky + dy)) {
                        for &id in ids {
                            if dist2(verts[id], p) <= WELD_TOL * WELD_TOL {
                                found = Some(id);
                                break 'search;
                            }
                        }
                    }
                }
            }
            let id = found.unwrap_or_else(|| {
                verts.push(p);
                grid.entry((kx, ky)).or_default().push(verts.len() - 1);
                verts.len() - 1
            });
            lp.push(id);
        }
        loops.push(lp);
    }

    // Snap boundary vertices exactly onto the square.
    for v in verts.iter_mut() {
        let f = sides(*v);
        if f & 1 != 0 {
            v[0] = 0.0;
        }
        if f & 2 != 0 {
            v[0] = 1.0;
        }
        if f & 4 != 0 {
            v[1] = 0.0;
        }
        if f & 8 != 0 {
            v[1] = 1.0;
        }
    }

    if min_edge > 0.0 {
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut flags: Vec<u8> = verts.iter().map(|&p| sides(p)).collect();
        let mut pos = verts.clone();
        let mut count: Vec<usize> = vec![1; verts.len()];
        for lp in &loops {
            for i in 0..lp.len() {
                let (a, b) = (lp[i], lp[(i + 1) % lp.len()]);
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra == rb || dist2(pos[ra], pos[rb]) >= min_edge * min_edge {
                    continue;
                }
                let (fa, fb) = (flags[ra], flags[rb]);
                let combined = fa | fb;
                let is_corner = |f: u8| f.count_ones() == 2;
                let new_pos = if combined == 0 {
                    let (ca, cb) = (count[ra] as f64, count[rb] as f64);
                    [
                        (pos[ra][0] * ca + pos[rb][0] * cb) / (ca + cb),
                        (pos[ra][1] * ca + pos[rb][1] * cb) / (ca + cb),
                    ]
                } else if is_corner(fa) && fb & !fa == 0 {
                    pos[ra]
                } else if is_corner(fb) && fa & !fb == 0 {
                    pos[rb]
                } else if combined.count_ones() == 1 {
                    // Both on the same side, or one interior: stay on the side.
                    let (ca, cb) = (count[ra] as f64, count[rb] as f64);
                    let mut p = [
                        (pos[ra][0] * ca + pos[rb][0] * cb) / (ca + cb),
                        (pos[ra][1] * ca + pos[rb][1] * cb) / (ca + cb),
                    ];
                    match combined {
                        1 => p[0] = 0.0,
                        2 => p[0] = 1.0,
                        4 => p[1] = 0.0,
                        _ => p[1] = 1.0,
                    }
                    if fa == 0 || fb == 0 {
                        // Boundary vertex keeps its position.
                        if fa != 0 {
                            p = pos[ra];
                        } else {
                            p = pos[rb];
                        }
                    }
                    p
                } else {
                    continue;
                };
                parent[rb] = ra;
                pos[ra] = new_pos;
                flags[ra] = combined;
                count[ra] += count[rb];
            }
        }
        let mut remap = vec![usize::MAX; verts.len()];
        let mut new_verts = Vec::new();
        for v in 0..verts.len() {
            let r = find(&mut parent, v);
            if remap[r] == usize::MAX {
                remap[r] = new_verts.len();
                new_verts.push(pos[r]);
            }
            remap[v] = remap[r];
        }
        for lp in loops.iter_mut() {
            for v in lp.iter_mut() {
                *v = remap[*v];
            }
        }
        verts = new_verts;
    }
    for lp in loops.iter_mut() {
        let mut cleaned: Vec<usize> = Vec::with_capacity(lp.len());
        for &v in lp.iter() {
            if cleaned.last() != Some(&v) {
                cleaned.push(v);
            }
        }
        while cleaned.len() > 1 && cleaned.first() == cleaned.last() {
            cleaned.pop();
        }
        *lp = cleaned;
    }
    (verts, loops)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn area(poly: &[P2]) -> f64 {
        let mut a = 0.0;
        for i in 0..poly.len() {
            let p = poly[i];
            let q = poly[(i + 1) % poly.len()];
            a += p[0] * q[1] - q[0] * p[1];
        }
        a / 2.0
    }

    #[test]
    fn two_seeds_split_square_in_half() {
        let cells = clipped_cells(&[[0.25, 0.5], [0.75, 0.5]]);
        assert!((area(&cells[0]) - 0.5).abs() < 1e-15);
        assert!((area(&cells[1]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn clipped_cells_tile_the_square() {
        let seeds: Vec<P2> = (0..30)
            .map(|i| {
                let t = i as f64;
                [
                    (t * 0.618_033_988_7).fract(),
                    (t * 0.414_213_562_3 + 0.1).fract(),
                ]
            })
            .collect();
        let total: f64 = clipped_cells(&seeds).iter().map(|c| area(c)).sum();
        assert!((total - 1.0).abs() < 1e-13);
    }
}
