/**
 * Post-run replay view: corridor, obstacles, driven path, collision
 * markers, and the metrics line. Only drawable once the server has
 * revealed the world.
 */
/** Fit courseLength x courseWidth meters into a width x height canvas. */
export function fitTransform(courseLength, courseWidth, width, height, margin = 12) {
    const scale = Math.min((width - 2 * margin) / courseLength, (height - 2 * margin) / courseWidth);
    return { scale, offsetX: margin, offsetY: margin };
}
export function toCanvas(t, x, y, courseWidth) {
    // world y points left; canvas y points down
    return [t.offsetX + x * t.scale, t.offsetY + (courseWidth - y) * t.scale];
}
export function metricsLine(reveal) {
    const m = reveal.metrics;
    const state = m.completed ? "completed" : "timed out";
    return `${state} in ${m.seconds.toFixed(1)} s (${m.ticks} ticks), ${m.collisions} collision${m.collisions === 1 ? "" : "s"}`;
}
export function drawReveal(canvas, reveal) {
    const ctx = canvas.getContext("2d");
    if (!ctx)
        return;
    const t = fitTransform(reveal.courseLength, reveal.courseWidth, canvas.width, canvas.height);
    const w = reveal.courseWidth;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    // corridor
    ctx.fillStyle = "#20242b";
    const [cx0, cy0] = toCanvas(t, 0, w, w);
    ctx.fillRect(cx0, cy0, reveal.courseLength * t.scale, w * t.scale);
    // obstacles
    for (const o of reveal.obstacles) {
        const [ox, oy] = toCanvas(t, o.x, o.y, w);
        ctx.beginPath();
        ctx.arc(ox, oy, Math.max(o.radius * t.scale, 2), 0, 2 * Math.PI);
        const [r, g, b] = o.color;
        ctx.fillStyle = `rgb(${Math.round(r * 255)},${Math.round(g * 255)},${Math.round(b * 255)})`;
        ctx.fill();
    }
    // driven path
    if (reveal.path.length > 1) {
        ctx.beginPath();
        const [px, py] = toCanvas(t, reveal.path[0][0], reveal.path[0][1], w);
        ctx.moveTo(px, py);
        for (const [x, y] of reveal.path.slice(1)) {
            const [qx, qy] = toCanvas(t, x, y, w);
            ctx.lineTo(qx, qy);
        }
        ctx.strokeStyle = "#7ec4f8";
        ctx.lineWidth = 1.5;
        ctx.stroke();
    }
    // collision markers
    ctx.fillStyle = "#ff5f56";
    for (const c of reveal.collisions) {
        const [mx, my] = toCanvas(t, c.x, c.y, w);
        ctx.beginPath();
        ctx.arc(mx, my, 3.5, 0, 2 * Math.PI);
        ctx.fill();
    }
}
